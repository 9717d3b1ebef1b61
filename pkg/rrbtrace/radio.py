"""
Radio abstraction shared by the scheduler simulator and the sniffer.

A cell is a grid of resource blocks (RBs) per subframe, addressed in groups
(RBGs). Each scheduling grant is a DCI message that travels unencrypted and
names the receiving UE by its C-RNTI, the direction, and an RBG bitmap.
With a fixed MCS every RB carries the same number of bytes, so the grant
bitmap alone determines how many bytes the UE moved in that subframe.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from enum import Enum
from functools import cached_property

from .errors import ConfigurationError


class ResourceType(Enum):
    GBR = "GBR"
    NON_GBR = "NonGBR"


class Direction(Enum):
    UPLINK = "UL"
    DOWNLINK = "DL"

    @property
    def dci_format(self) -> int:
        """DCI type carrying grants for this direction (0 uplink, 1 downlink)."""
        return 0 if self is Direction.UPLINK else 1

    @classmethod
    def parse(cls, token: str) -> Direction:
        try:
            return cls(token)
        except ValueError:
            raise ConfigurationError(f"Unknown direction '{token}', expected UL or DL", context="direction")


DIRECTIONS = (Direction.UPLINK, Direction.DOWNLINK)

CRNTI_MIN = 0x003D
CRNTI_MAX = 0xFFF3


@dataclass(frozen=True)
class QosClass:
    qci_id: int
    resource_type: ResourceType
    priority_level: int
    packet_delay_budget_ms: int
    packet_error_rate: float
    max_data_burst: int

    def __post_init__(self) -> None:
        if not 1 <= self.qci_id <= 26:
            raise ConfigurationError(f"QCI {self.qci_id} outside 1..26", context="qos.qci_id")
        if not 0.0 <= self.packet_error_rate <= 1.0:
            raise ConfigurationError(
                f"Packet error rate {self.packet_error_rate} outside [0, 1]", context="qos.packet_error_rate")
        if self.max_data_burst <= 0:
            raise ConfigurationError("Max data burst must be positive", context="qos.max_data_burst")

    @property
    def is_gbr(self) -> bool:
        return self.resource_type is ResourceType.GBR


# Standardized QCI characteristics used by the profile catalogue.
# Format: {qci: (resource type, priority level, delay budget ms, packet error rate, max data burst bytes)}
STANDARD_QCI = {
    1: (ResourceType.GBR, 2, 100, 1e-2, 1354),
    2: (ResourceType.GBR, 4, 150, 1e-3, 1354),
    6: (ResourceType.NON_GBR, 6, 300, 1e-6, 1358),
    7: (ResourceType.NON_GBR, 7, 100, 1e-3, 1358),
    8: (ResourceType.NON_GBR, 8, 300, 1e-6, 1358),
    9: (ResourceType.NON_GBR, 9, 300, 1e-6, 1358),
}


def standard_qos(qci_id: int) -> QosClass:
    """Build the QosClass for a standardized QCI."""
    if qci_id not in STANDARD_QCI:
        raise ConfigurationError(f"No standard characteristics for QCI {qci_id}", context="qos.qci_id")
    resource_type, priority, delay, error_rate, burst = STANDARD_QCI[qci_id]
    return QosClass(qci_id, resource_type, priority, delay, error_rate, burst)


@dataclass(frozen=True)
class UeIdentity:
    crnti: int

    def __post_init__(self) -> None:
        if not 0 <= self.crnti <= 0xFFFF:
            raise ConfigurationError(f"C-RNTI {self.crnti} is not a 16-bit value", context="crnti")

    def __str__(self) -> str:
        return str(self.crnti)


@dataclass(frozen=True)
class CellConfig:
    total_rbs: int = 100
    rbg_size: int = 4
    tbs_per_rb: int = 100
    subframe_ms: int = 1

    def __post_init__(self) -> None:
        for name in ("total_rbs", "rbg_size", "tbs_per_rb", "subframe_ms"):
            if getattr(self, name) <= 0:
                raise ConfigurationError(f"{name} must be positive", context=f"cell.{name}")
        if self.total_rbs % self.rbg_size != 0:
            raise ConfigurationError(
                f"total_rbs {self.total_rbs} is not divisible by rbg_size {self.rbg_size}",
                context="cell.total_rbs")

    @property
    def rbg_count(self) -> int:
        return self.total_rbs // self.rbg_size

    @property
    def rbg_bytes(self) -> int:
        """Bytes carried by one fully granted RBG."""
        return self.rbg_size * self.tbs_per_rb


@dataclass(frozen=True)
class RbgBitmap:
    bits: tuple[bool, ...]
    rbg_size: int

    @classmethod
    def empty(cls, cell: CellConfig) -> RbgBitmap:
        return cls((False,) * cell.rbg_count, cell.rbg_size)

    @classmethod
    def contiguous(cls, start: int, count: int, cell: CellConfig) -> RbgBitmap:
        """Allocation of `count` RBGs starting at RBG index `start`."""
        if start < 0 or count < 0 or start + count > cell.rbg_count:
            raise ConfigurationError(
                f"RBGs {start}..{start + count} do not fit in {cell.rbg_count} groups", context="bitmap")
        bits = tuple(start <= i < start + count for i in range(cell.rbg_count))
        return cls(bits, cell.rbg_size)

    @classmethod
    def from_string(cls, text: str, rbg_size: int) -> RbgBitmap:
        """Parse a '1011'-style bit string, RBG 0 first."""
        if any(c not in "01" for c in text):
            raise ConfigurationError(f"Invalid bit string '{text}'", context="bitmap")
        return cls(tuple(c == "1" for c in text), rbg_size)

    @classmethod
    def from_hex(cls, text: str, cell: CellConfig) -> RbgBitmap:
        width = cell.rbg_count
        try:
            value = int(text, 16)
        except ValueError:
            raise ConfigurationError(f"Invalid bitmap hex '{text}'", context="bitmap")
        if value >> width:
            raise ConfigurationError(
                f"Bitmap {text} has bits beyond {width} groups", context="bitmap")
        return cls.from_string(format(value, f"0{width}b"), cell.rbg_size)

    def to_hex(self) -> str:
        width = math.ceil(len(self.bits) / 4)
        value = int(self.to_string() or "0", 2)
        return format(value, f"0{width}x")

    def to_string(self) -> str:
        return "".join("1" if bit else "0" for bit in self.bits)

    @cached_property
    def set_bits(self) -> int:
        return sum(self.bits)


def rb_count(bitmap: RbgBitmap, cell: CellConfig | None = None) -> int:
    """Number of RBs a bitmap grants: set bits times the group size."""
    if cell is not None:
        if len(bitmap.bits) * bitmap.rbg_size != cell.total_rbs or bitmap.rbg_size != cell.rbg_size:
            raise ConfigurationError(
                f"Bitmap of {len(bitmap.bits)} groups of {bitmap.rbg_size} does not match a cell of "
                f"{cell.total_rbs} RBs in groups of {cell.rbg_size}",
                context="bitmap")
    return bitmap.set_bits * bitmap.rbg_size


def grant_bytes(bitmap: RbgBitmap, cell: CellConfig) -> int:
    """Transport-block bytes carried by a grant under the fixed-MCS model."""
    return rb_count(bitmap, cell) * cell.tbs_per_rb


@dataclass(frozen=True)
class DciGrant:
    subframe_index: int
    rnti: UeIdentity
    direction: Direction
    bitmap: RbgBitmap
    tbs_bytes: int

    @classmethod
    def issue(cls, subframe: int, rnti: UeIdentity, direction: Direction,
              bitmap: RbgBitmap, cell: CellConfig) -> DciGrant:
        return cls(subframe, rnti, direction, bitmap, grant_bytes(bitmap, cell))

    @property
    def rb_count(self) -> int:
        return rb_count(self.bitmap)
