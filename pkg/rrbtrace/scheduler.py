"""
Per-subframe MAC scheduler.

GBR queues are served first with their persistent allocation, whether or not
they hold data. Whatever is left goes to non-GBR queues in priority order,
each sized from its buffer status report. Uplink and downlink are scheduled
on separate resource grids.
"""

from __future__ import annotations

import logging
import math
from dataclasses import dataclass, field
from functools import lru_cache
from typing import Sequence

from .errors import ConfigurationError
from .profiles import AppProfile
from .radio import DIRECTIONS, CellConfig, DciGrant, Direction, QosClass, RbgBitmap, UeIdentity

logger = logging.getLogger(__name__)


@dataclass
class MacQueue:
    qos: QosClass
    direction: Direction
    buffered_bytes: int = 0

    def enqueue(self, amount: int) -> None:
        if amount < 0:
            raise ConfigurationError(f"Cannot enqueue {amount} bytes", context="queue")
        self.buffered_bytes += amount

    def drain(self, granted: int) -> int:
        """Remove up to `granted` bytes and return how many actually left the queue."""
        drained = min(self.buffered_bytes, granted)
        self.buffered_bytes -= drained
        return drained


def buffer_status(queue: MacQueue) -> int:
    """Idealized buffer status report: the exact number of queued bytes."""
    return queue.buffered_bytes


@dataclass
class SimUe:
    identity: UeIdentity
    profile: AppProfile
    queues: dict[Direction, MacQueue] = field(default_factory=dict)

    @classmethod
    def attach(cls, identity: UeIdentity, profile: AppProfile) -> SimUe:
        """A UE with one empty queue per direction for its profile's QoS class."""
        queues = {direction: MacQueue(profile.qos, direction) for direction in DIRECTIONS}
        return cls(identity, profile, queues)

    @property
    def is_gbr(self) -> bool:
        return self.profile.qos.is_gbr

    def persistent_rbs(self, direction: Direction) -> int:
        return self.profile.params(direction).persistent_rbs


def validate_gbr_demand(cell: CellConfig, ues: Sequence[SimUe]) -> None:
    """Reject persistent allocations that cannot be honored in every subframe."""
    for direction in DIRECTIONS:
        demand = 0
        for ue in ues:
            if not ue.is_gbr:
                continue
            rbs = ue.persistent_rbs(direction)
            if rbs % cell.rbg_size != 0:
                raise ConfigurationError(
                    f"Persistent allocation of {rbs} RBs for C-RNTI {ue.identity} is not a multiple of "
                    f"rbg_size {cell.rbg_size}",
                    context="profile.persistent_rbs")
            demand += rbs
        if demand > cell.total_rbs:
            raise ConfigurationError(
                f"GBR persistent {direction.value} demand of {demand} RBs exceeds the cell's {cell.total_rbs} RBs",
                context="ues")


@lru_cache(maxsize=4096)
def _bitmap(start: int, count: int, cell: CellConfig) -> RbgBitmap:
    return RbgBitmap.contiguous(start, count, cell)


def _rbgs_for_buffer(cell: CellConfig, buffered: int) -> int:
    rbs = math.ceil(buffered / cell.tbs_per_rb)
    return math.ceil(rbs / cell.rbg_size)


def _service_order(ues: Sequence[SimUe], subframe: int) -> tuple[list[SimUe], list[SimUe]]:
    """GBR UEs by priority, then non-GBR UEs by priority."""
    indexed = list(enumerate(ues))
    gbr = sorted((pair for pair in indexed if pair[1].is_gbr),
                 key=lambda pair: (pair[1].profile.qos.priority_level, pair[0]))
    # Equal priorities rotate with the subframe index so nobody starves.
    count = len(ues)
    best_effort = sorted((pair for pair in indexed if not pair[1].is_gbr),
                         key=lambda pair: (pair[1].profile.qos.priority_level, (pair[0] - subframe) % count))
    return [ue for _, ue in gbr], [ue for _, ue in best_effort]


def _schedule_direction(cell: CellConfig, gbr: list[SimUe], best_effort: list[SimUe], subframe: int,
                        direction: Direction) -> list[DciGrant]:
    grants: list[DciGrant] = []
    next_free = 0

    def allocate(ue: SimUe, rbgs: int) -> None:
        nonlocal next_free
        bitmap = _bitmap(next_free, rbgs, cell)
        next_free += rbgs
        grant = DciGrant.issue(subframe, ue.identity, direction, bitmap, cell)
        ue.queues[direction].drain(grant.tbs_bytes)
        grants.append(grant)

    for ue in gbr:
        rbgs = ue.persistent_rbs(direction) // cell.rbg_size
        if next_free + rbgs > cell.rbg_count:
            raise ConfigurationError(
                f"GBR demand exceeds cell capacity in subframe {subframe}", context="ues")
        allocate(ue, rbgs)

    for ue in best_effort:
        remaining = cell.rbg_count - next_free
        if remaining == 0:
            break
        buffered = buffer_status(ue.queues[direction])
        if buffered == 0:
            continue
        wanted = _rbgs_for_buffer(cell, buffered)
        if wanted > remaining:
            logger.debug("Subframe %d %s: C-RNTI %s capped at %d of %d RBGs",
                         subframe, direction.value, ue.identity, remaining, wanted)
        allocate(ue, min(wanted, remaining))
    return grants


def schedule_subframe(cell: CellConfig, ues: Sequence[SimUe], subframe: int) -> list[DciGrant]:
    """Issue this subframe's grants and drain the granted queues.

    Grants come back ordered by C-RNTI, uplink before downlink.
    """
    gbr, best_effort = _service_order(ues, subframe)
    grants: list[DciGrant] = []
    for direction in DIRECTIONS:
        grants.extend(_schedule_direction(cell, gbr, best_effort, subframe, direction))
    grants.sort(key=lambda grant: (grant.rnti.crnti, grant.direction.dci_format))
    return grants
