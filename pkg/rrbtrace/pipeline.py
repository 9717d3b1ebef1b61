"""
Throughput processing chain.

Traces from repeated runs are averaged, normalized on a rolling window for
plotting, and cleaned for feature extraction: zeros are dropped and values
above Q3 + k*IQR are capped at a high percentile of the original data. The
cleaned series yields mean, STD, slope, Q1 and Q3 per direction.

Percentiles use linear interpolation at index p/100*(n-1), standard deviation
is the population one, and slopes are least-squares against the bin index.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from enum import Enum
from typing import Sequence

import numpy as np
from numpy.lib.stride_tricks import sliding_window_view

from .errors import ConfigurationError, DegenerateTraceError, DimensionError, EmptyDataError, UndefinedCorrelationError


class SeriesUnit(Enum):
    RAW_BYTES = "RawBytes"
    NORMALIZED = "Normalized"


@dataclass(frozen=True, eq=False)
class ThroughputSeries:
    bin_width_ms: float
    values: np.ndarray
    unit: SeriesUnit = SeriesUnit.RAW_BYTES

    def __post_init__(self) -> None:
        values = np.array(self.values, dtype=np.float64)
        if values.ndim != 1:
            raise DimensionError("Throughput series must be one-dimensional", context="series")
        if not np.all(np.isfinite(values)):
            raise ConfigurationError("Throughput values must be finite", context="series")
        if np.any(values < 0):
            raise ConfigurationError("Throughput values must be non-negative", context="series")
        if self.bin_width_ms <= 0:
            raise ConfigurationError("Bin width must be positive", context="series.bin_width_ms")
        values.flags.writeable = False
        object.__setattr__(self, "values", values)

    @classmethod
    def from_bytes(cls, values: Sequence[float] | np.ndarray, bin_width_ms: float) -> ThroughputSeries:
        return cls(bin_width_ms, np.asarray(values, dtype=np.float64))

    def __len__(self) -> int:
        return len(self.values)

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, ThroughputSeries):
            return NotImplemented
        return (self.bin_width_ms == other.bin_width_ms and self.unit == other.unit
                and np.array_equal(self.values, other.values))

    __hash__ = None  # type: ignore[assignment]


Data = ThroughputSeries | Sequence[float] | np.ndarray


def as_array(data: Data) -> np.ndarray:
    if isinstance(data, ThroughputSeries):
        return data.values
    return np.asarray(data, dtype=np.float64)


@dataclass(frozen=True)
class PipelineConfig:
    window_fraction: float = 0.2
    iqr_multiplier: float = 2.0
    cap_percentile: float = 95.0
    min_window: int = 2

    def __post_init__(self) -> None:
        if not 0.0 < self.window_fraction <= 1.0:
            raise ConfigurationError("window_fraction must lie in (0, 1]", context="pipeline.window_fraction")
        if self.iqr_multiplier <= 0:
            raise ConfigurationError("iqr_multiplier must be positive", context="pipeline.iqr_multiplier")
        if not 0.0 < self.cap_percentile < 100.0:
            raise ConfigurationError("cap_percentile must lie in (0, 100)", context="pipeline.cap_percentile")
        if self.min_window < 1:
            raise ConfigurationError("min_window must be at least 1", context="pipeline.min_window")


@dataclass(frozen=True)
class DirectionFeatures:
    mean: float
    std: float
    slope: float
    q1: float
    q3: float

    def as_tuple(self) -> tuple[float, float, float, float, float]:
        return (self.mean, self.std, self.slope, self.q1, self.q3)


FEATURE_NAMES = (
    "ul_mean", "ul_std", "ul_slope", "ul_q1", "ul_q3",
    "dl_mean", "dl_std", "dl_slope", "dl_q1", "dl_q3",
)


@dataclass(frozen=True)
class FeatureVector:
    ul: DirectionFeatures
    dl: DirectionFeatures
    class_label: str | None = None

    def as_row(self) -> tuple[float, ...]:
        return self.ul.as_tuple() + self.dl.as_tuple()

    @classmethod
    def from_row(cls, row: Sequence[float], class_label: str | None = None) -> FeatureVector:
        if len(row) != len(FEATURE_NAMES):
            raise DimensionError(f"Expected {len(FEATURE_NAMES)} features, got {len(row)}", context="features")
        return cls(DirectionFeatures(*row[:5]), DirectionFeatures(*row[5:]), class_label)


@dataclass(frozen=True, eq=False)
class CdfCurve:
    support: np.ndarray
    probabilities: np.ndarray

    def points(self) -> list[tuple[float, float]]:
        return list(zip(self.support.tolist(), self.probabilities.tolist()))


def average_iterations(traces: Sequence[ThroughputSeries]) -> ThroughputSeries:
    """Element-wise mean of repeated traces, truncated to the shortest one."""
    if not traces:
        raise EmptyDataError("No traces to average", context="average_iterations")
    widths = {trace.bin_width_ms for trace in traces}
    if len(widths) > 1:
        raise ConfigurationError(
            f"Cannot average traces with different bin widths {sorted(widths)}", context="bin_width_ms")
    units = {trace.unit for trace in traces}
    if len(units) > 1:
        raise ConfigurationError("Cannot average raw and normalized traces together", context="unit")
    length = min(len(trace) for trace in traces)
    stacked = np.stack([trace.values[:length] for trace in traces])
    return ThroughputSeries(traces[0].bin_width_ms, stacked.mean(axis=0), traces[0].unit)


def percentile(data: Data, p: float) -> float:
    values = as_array(data)
    if values.size == 0:
        raise EmptyDataError("Percentile of empty data", context="percentile")
    if not 0.0 <= p <= 100.0:
        raise ConfigurationError(f"Percentile {p} outside [0, 100]", context="percentile")
    return float(np.percentile(values, p, method="linear"))


def remove_zeros(data: Data) -> np.ndarray:
    values = as_array(data)
    kept = values[values > 0]
    if kept.size == 0:
        raise DegenerateTraceError("No non-zero values left", context="remove_zeros")
    return kept


def iqr_upper_bound(data: Data, cfg: PipelineConfig) -> float:
    q1, q3 = percentile(data, 25.0), percentile(data, 75.0)
    return q3 + cfg.iqr_multiplier * (q3 - q1)


def iqr_cap(data: Data, cfg: PipelineConfig | None = None) -> np.ndarray:
    """Replace every value above Q3 + k*IQR with the cap percentile of the original data."""
    cfg = cfg or PipelineConfig()
    values = as_array(data)
    if values.size == 0:
        raise EmptyDataError("Cannot cap empty data", context="iqr_cap")
    upper = iqr_upper_bound(values, cfg)
    cap = percentile(values, cfg.cap_percentile)
    return np.where(values > upper, cap, values)


def _round_half_up(x: float) -> int:
    return math.floor(x + 0.5)


def window_size(length: int, cfg: PipelineConfig) -> int:
    return max(cfg.min_window, _round_half_up(cfg.window_fraction * length))


def rolling_normalize(series: ThroughputSeries, cfg: PipelineConfig | None = None) -> ThroughputSeries:
    """Min-max scale each value against its trailing window; flat windows give 0."""
    cfg = cfg or PipelineConfig()
    values = series.values
    if values.size == 0:
        raise EmptyDataError("Cannot normalize an empty series", context="rolling_normalize")
    w = window_size(values.size, cfg)
    # Leading copies of the first value leave every partial window's extremes unchanged.
    padded = np.pad(values, (w - 1, 0), mode="edge")
    windows = sliding_window_view(padded, w)
    low, high = windows.min(axis=1), windows.max(axis=1)
    spread = high - low
    flat = spread == 0
    normalized = np.where(flat, 0.0, (values - low) / np.where(flat, 1.0, spread))
    return ThroughputSeries(series.bin_width_ms, normalized, SeriesUnit.NORMALIZED)


def slope(data: Data) -> float:
    values = as_array(data)
    if values.size < 2:
        raise EmptyDataError(f"Slope needs at least two points, got {values.size}", context="slope")
    x = np.arange(values.size, dtype=np.float64)
    dx = x - x.mean()
    return float(np.dot(dx, values - values.mean()) / np.dot(dx, dx))


def _direction_features(values: np.ndarray, cfg: PipelineConfig, direction: str) -> DirectionFeatures:
    try:
        clean = iqr_cap(remove_zeros(values), cfg)
    except DegenerateTraceError:
        raise DegenerateTraceError(f"{direction} throughput is all zeros", context=direction)
    if clean.size < 2:
        raise DegenerateTraceError(
            f"{direction} throughput has a single non-zero bin", context=direction)
    return DirectionFeatures(
        mean=float(np.mean(clean)),
        std=float(np.std(clean)),
        slope=slope(clean),
        q1=percentile(clean, 25.0),
        q3=percentile(clean, 75.0),
    )


def extract_features(ul: Data, dl: Data, cfg: PipelineConfig | None = None,
                     class_label: str | None = None) -> FeatureVector:
    cfg = cfg or PipelineConfig()
    return FeatureVector(
        _direction_features(as_array(ul), cfg, "UL"),
        _direction_features(as_array(dl), cfg, "DL"),
        class_label,
    )


def empirical_cdf(data: Data) -> CdfCurve:
    values = as_array(data)
    if values.size == 0:
        raise EmptyDataError("CDF of empty data", context="empirical_cdf")
    support, counts = np.unique(values, return_counts=True)
    probabilities = np.cumsum(counts) / values.size
    return CdfCurve(support, probabilities)


def pearson_correlation(a: Data, b: Data) -> float:
    x, y = as_array(a), as_array(b)
    if x.size != y.size:
        raise DimensionError(f"Series lengths differ: {x.size} vs {y.size}", context="pearson_correlation")
    if x.size < 2:
        raise EmptyDataError("Correlation needs at least two points", context="pearson_correlation")
    if np.ptp(x) == 0 or np.ptp(y) == 0:
        raise UndefinedCorrelationError("Correlation is undefined for a constant series",
                                        context="pearson_correlation")
    r = float(np.corrcoef(x, y)[0, 1])
    return min(1.0, max(-1.0, r))
