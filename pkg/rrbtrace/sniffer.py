"""
Passive eavesdropper over a plaintext DCI log.

The attacker learns C-RNTIs from random access responses, then follows every
grant addressed to the victim. Summing granted transport-block bytes per time
bin gives the victim's uplink and downlink radio throughput.
"""

from __future__ import annotations

import csv
import logging
import math
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from .errors import ConfigurationError, LogIntegrityError, NotFoundError
from .pipeline import ThroughputSeries
from .radio import Direction, UeIdentity
from .simulator import DciLog

logger = logging.getLogger(__name__)

DEFAULT_BIN_SUBFRAMES = 100
TRACE_HEADER = ["bin_index", "ul_bytes", "dl_bytes"]


@dataclass(frozen=True)
class VictimTrace:
    crnti: UeIdentity
    ul: ThroughputSeries
    dl: ThroughputSeries
    partial_last_bin: bool = False


def identify_victims(log: DciLog) -> list[UeIdentity]:
    """C-RNTIs announced in random access responses, first occurrence order."""
    seen: dict[int, int] = {}
    for event in log.rar_events:
        seen.setdefault(event.rnti.crnti, event.subframe)
    for grant in log.grants:
        assigned = seen.get(grant.rnti.crnti)
        if assigned is None:
            raise LogIntegrityError(
                f"Grant in subframe {grant.subframe_index} addresses C-RNTI {grant.rnti} "
                f"that no random access response assigned",
                context="dci_log")
        if assigned > grant.subframe_index:
            raise LogIntegrityError(
                f"Grant in subframe {grant.subframe_index} precedes the assignment of C-RNTI {grant.rnti}",
                context="dci_log")
    return [UeIdentity(crnti) for crnti in seen]


def log_span(log: DciLog) -> int:
    """Number of subframes the log covers."""
    if log.duration_subframes is not None:
        return log.duration_subframes
    last = max((g.subframe_index for g in log.grants), default=-1)
    last = max([last] + [e.subframe for e in log.rar_events])
    return last + 1


def reconstruct_throughput(log: DciLog, victim: UeIdentity, bin_subframes: int = DEFAULT_BIN_SUBFRAMES,
                           subframe_ms: float = 1.0) -> VictimTrace:
    if bin_subframes < 1:
        raise ConfigurationError(f"Bin width must be at least one subframe, got {bin_subframes}",
                                context="bin_subframes")
    if victim not in identify_victims(log):
        raise NotFoundError(f"C-RNTI {victim} does not appear in the log", context=f"rnti {victim}")

    span = log_span(log)
    bins = max(1, math.ceil(span / bin_subframes))
    mine = [g for g in log.grants if g.rnti == victim]
    series: dict[Direction, np.ndarray] = {}
    for direction in Direction:
        chosen = [g for g in mine if g.direction is direction]
        positions = np.array([g.subframe_index // bin_subframes for g in chosen], dtype=np.int64)
        weights = np.array([g.tbs_bytes for g in chosen], dtype=np.float64)
        series[direction] = np.bincount(positions, weights=weights, minlength=bins)

    partial = span % bin_subframes != 0
    if partial:
        logger.info("C-RNTI %s: last bin covers %d of %d subframes", victim, span % bin_subframes, bin_subframes)
    width = bin_subframes * subframe_ms
    return VictimTrace(
        victim,
        ThroughputSeries.from_bytes(series[Direction.UPLINK], width),
        ThroughputSeries.from_bytes(series[Direction.DOWNLINK], width),
        partial,
    )


def sniff_all(log: DciLog, bin_subframes: int = DEFAULT_BIN_SUBFRAMES,
              subframe_ms: float = 1.0) -> list[VictimTrace]:
    return [reconstruct_throughput(log, victim, bin_subframes, subframe_ms) for victim in identify_victims(log)]


def write_trace_csv(trace: VictimTrace, path: Path) -> None:
    path.parent.mkdir(parents=True, exist_ok=True)
    with open(path, "w", newline="", encoding="utf-8") as f:
        writer = csv.writer(f, lineterminator="\n")
        writer.writerow(TRACE_HEADER)
        for index, (ul, dl) in enumerate(zip(trace.ul.values, trace.dl.values)):
            writer.writerow([index, int(ul), int(dl)])


def read_trace_csv(path: Path, bin_width_ms: float = DEFAULT_BIN_SUBFRAMES,
                   crnti: int = 0) -> VictimTrace:
    if not path.is_file():
        raise NotFoundError(f"Trace file '{path}' not found", context=str(path))
    ul: list[float] = []
    dl: list[float] = []
    with open(path, newline="", encoding="utf-8") as f:
        reader = csv.reader(f)
        if next(reader, None) != TRACE_HEADER:
            raise LogIntegrityError(f"Expected header {','.join(TRACE_HEADER)}", context=f"{path}:1")
        for row in reader:
            if not row:
                continue
            try:
                index, up, down = int(row[0]), float(row[1]), float(row[2])
            except (ValueError, IndexError):
                raise LogIntegrityError(f"Malformed trace row {row}", context=f"{path}:{reader.line_num}")
            if index != len(ul):
                raise LogIntegrityError(f"Bin {index} out of order", context=f"{path}:{reader.line_num}")
            ul.append(up)
            dl.append(down)
    return VictimTrace(UeIdentity(crnti), ThroughputSeries.from_bytes(ul, bin_width_ms),
                       ThroughputSeries.from_bytes(dl, bin_width_ms))
