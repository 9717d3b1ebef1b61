"""CSV persistence for DCI logs, RAR events and simulator ground truth."""

from __future__ import annotations

import csv
from pathlib import Path
from typing import Iterator

from .errors import ConfigurationError, LogIntegrityError, NotFoundError
from .radio import DIRECTIONS, CellConfig, DciGrant, Direction, RbgBitmap, UeIdentity, grant_bytes
from .simulator import DciLog, GroundTruth, RarEvent

GRANT_HEADER = ["subframe", "rnti", "direction", "bitmap_hex", "tbs_bytes"]
RAR_HEADER = ["subframe", "rnti"]
TRUTH_HEADER = ["subframe", "rnti", "label", "ul_bytes", "dl_bytes"]


def _write_rows(path: Path, header: list[str], rows: Iterator[list[object]]) -> None:
    path.parent.mkdir(parents=True, exist_ok=True)
    with open(path, "w", newline="", encoding="utf-8") as f:
        writer = csv.writer(f, lineterminator="\n")
        writer.writerow(header)
        writer.writerows(rows)


def _read_rows(path: Path, header: list[str]) -> Iterator[tuple[int, list[str]]]:
    """Yield (line number, row) after checking the header."""
    if not path.is_file():
        raise NotFoundError(f"File '{path}' not found", context=str(path))
    with open(path, newline="", encoding="utf-8") as f:
        reader = csv.reader(f)
        found = next(reader, None)
        if found != header:
            raise LogIntegrityError(
                f"Expected header {','.join(header)}, found {','.join(found or [])}", context=f"{path}:1")
        for row in reader:
            if not row:
                continue
            if len(row) != len(header):
                raise LogIntegrityError(
                    f"Expected {len(header)} fields, found {len(row)}", context=f"{path}:{reader.line_num}")
            yield reader.line_num, row


def write_dci_log(log: DciLog, grants_path: Path, rar_path: Path) -> None:
    _write_rows(grants_path, GRANT_HEADER, (
        [g.subframe_index, g.rnti.crnti, g.direction.value, g.bitmap.to_hex(), g.tbs_bytes]
        for g in log.grants
    ))
    _write_rows(rar_path, RAR_HEADER, ([e.subframe, e.rnti.crnti] for e in log.rar_events))


def read_rar_events(rar_path: Path) -> tuple[RarEvent, ...]:
    events: list[RarEvent] = []
    for line, row in _read_rows(rar_path, RAR_HEADER):
        try:
            events.append(RarEvent(int(row[0]), UeIdentity(int(row[1]))))
        except (ValueError, ConfigurationError) as error:
            raise LogIntegrityError(f"Malformed RAR event: {error}", context=f"{rar_path}:{line}")
    return tuple(events)


def read_dci_log(grants_path: Path, rar_path: Path, cell: CellConfig | None = None,
                 duration_subframes: int | None = None) -> DciLog:
    """Load a DCI log.

    Every grant's byte count must agree with its bitmap, grants must be sorted
    by subframe then RNTI, and with a known duration no grant may fall past it.
    """
    cell = cell or CellConfig()
    grants: list[DciGrant] = []
    previous = (-1, -1)
    for line, row in _read_rows(grants_path, GRANT_HEADER):
        try:
            subframe, rnti, tbs = int(row[0]), UeIdentity(int(row[1])), int(row[4])
            direction = Direction.parse(row[2])
            bitmap = RbgBitmap.from_hex(row[3], cell)
        except (ValueError, ConfigurationError) as error:
            raise LogIntegrityError(f"Malformed grant: {error}", context=f"{grants_path}:{line}")
        if tbs != grant_bytes(bitmap, cell):
            raise LogIntegrityError(
                f"Grant carries {tbs} bytes but its bitmap allows {grant_bytes(bitmap, cell)}",
                context=f"{grants_path}:{line}")
        key = (subframe, rnti.crnti)
        if subframe < 0 or key < previous:
            raise LogIntegrityError(
                f"Grant for subframe {subframe}, RNTI {rnti} is out of order", context=f"{grants_path}:{line}")
        if duration_subframes is not None and subframe >= duration_subframes:
            raise LogIntegrityError(
                f"Grant in subframe {subframe} lies past the {duration_subframes}-subframe run",
                context=f"{grants_path}:{line}")
        previous = key
        grants.append(DciGrant(subframe, rnti, direction, bitmap, tbs))
    return DciLog(read_rar_events(rar_path), tuple(grants), duration_subframes)


def write_ground_truth(truth: GroundTruth, path: Path) -> None:
    def rows() -> Iterator[list[object]]:
        for crnti in sorted(truth.ues):
            ue = truth.ues[crnti]
            ul, dl = (ue.granted[direction] for direction in DIRECTIONS)
            for subframe in range(len(ul)):
                yield [subframe, crnti, ue.class_label, int(ul[subframe]), int(dl[subframe])]
    _write_rows(path, TRUTH_HEADER, rows())
