"""
Labeled feature datasets: construction from trace directories, CSV
persistence and the stratified train/test split.

A traces directory holds one subdirectory per class label, each containing
`bin_index,ul_bytes,dl_bytes` trace CSVs (one per iteration).
"""

from __future__ import annotations

import csv
import hashlib
import logging
import math
from dataclasses import dataclass
from pathlib import Path
from typing import Sequence

import numpy as np

from .errors import (
    ConfigurationError,
    DegenerateTraceError,
    DimensionError,
    EmptyDataError,
    LogIntegrityError,
    NotFoundError,
    StratificationError,
)
from .pipeline import FEATURE_NAMES, CdfCurve, FeatureVector, PipelineConfig, average_iterations, extract_features
from .sniffer import read_trace_csv

logger = logging.getLogger(__name__)

DATASET_HEADER = ["label", *FEATURE_NAMES]
CDF_HEADER = ["value", "probability"]


@dataclass(frozen=True)
class Sample:
    features: tuple[float, ...]
    label: str

    @property
    def row_id(self) -> str:
        """Content-derived identity; identical rows are interchangeable."""
        text = self.label + "|" + ",".join(repr(value) for value in self.features)
        return hashlib.sha256(text.encode("utf-8")).hexdigest()


@dataclass(frozen=True)
class Dataset:
    samples: tuple[Sample, ...]

    def __post_init__(self) -> None:
        dimensions = {len(sample.features) for sample in self.samples}
        if len(dimensions) > 1:
            raise DimensionError(f"Rows have mixed dimensionality {sorted(dimensions)}", context="dataset")

    @classmethod
    def from_vectors(cls, vectors: Sequence[FeatureVector]) -> Dataset:
        samples = []
        for vector in vectors:
            if vector.class_label is None:
                raise ConfigurationError("Every feature vector needs a class label", context="dataset")
            samples.append(Sample(vector.as_row(), vector.class_label))
        return cls(tuple(samples))

    def __len__(self) -> int:
        return len(self.samples)

    @property
    def dimension(self) -> int:
        return len(self.samples[0].features) if self.samples else 0

    @property
    def labels(self) -> tuple[str, ...]:
        """Label dictionary: distinct labels in sorted order."""
        return tuple(sorted({sample.label for sample in self.samples}))

    def canonical(self) -> Dataset:
        return Dataset(tuple(sorted(self.samples, key=lambda s: (s.label, s.row_id))))

    def matrix(self) -> tuple[np.ndarray, np.ndarray]:
        """Feature matrix and label-dictionary indices."""
        index = {label: i for i, label in enumerate(self.labels)}
        X = np.array([sample.features for sample in self.samples], dtype=np.float64).reshape(len(self), self.dimension)
        y = np.array([index[sample.label] for sample in self.samples], dtype=np.int64)
        return X, y


def _round_half_up(x: float) -> int:
    return math.floor(x + 0.5)


def train_test_split(ds: Dataset, train_fraction: float = 0.7, seed: int = 42) -> tuple[Dataset, Dataset]:
    """Stratified shuffle split; each label keeps round(fraction * n_label) rows for training."""
    if not 0.0 < train_fraction < 1.0:
        raise ConfigurationError(f"Train fraction {train_fraction} outside (0, 1)", context="train_fraction")
    if len(ds) == 0:
        raise EmptyDataError("Cannot split an empty dataset", context="train_test_split")
    rng = np.random.Generator(np.random.PCG64(np.random.SeedSequence([seed])))
    canonical = ds.canonical()
    train: list[Sample] = []
    test: list[Sample] = []
    for label in canonical.labels:
        rows = [sample for sample in canonical.samples if sample.label == label]
        if len(rows) < 2:
            raise StratificationError(
                f"Label '{label}' has {len(rows)} row(s); stratification needs at least 2", context=label)
        n_train = _round_half_up(train_fraction * len(rows))
        if n_train == 0 or n_train == len(rows):
            raise StratificationError(
                f"Fraction {train_fraction} leaves label '{label}' ({len(rows)} rows) without a "
                f"{'training' if n_train == 0 else 'test'} row", context=label)
        order = rng.permutation(len(rows))
        train.extend(rows[i] for i in order[:n_train])
        test.extend(rows[i] for i in order[n_train:])
    return Dataset(tuple(train)).canonical(), Dataset(tuple(test)).canonical()


def write_feature_csv(vectors: Sequence[FeatureVector], path: Path) -> None:
    path.parent.mkdir(parents=True, exist_ok=True)
    with open(path, "w", newline="", encoding="utf-8") as f:
        writer = csv.writer(f, lineterminator="\n")
        writer.writerow(DATASET_HEADER)
        for vector in vectors:
            writer.writerow([vector.class_label or "", *(repr(value) for value in vector.as_row())])


def read_feature_csv(path: Path) -> Dataset:
    if not path.is_file():
        raise NotFoundError(f"Dataset file '{path}' not found", context=str(path))
    samples: list[Sample] = []
    with open(path, newline="", encoding="utf-8") as f:
        reader = csv.reader(f)
        if next(reader, None) != DATASET_HEADER:
            raise LogIntegrityError(f"Expected header {','.join(DATASET_HEADER)}", context=f"{path}:1")
        for row in reader:
            if not row:
                continue
            try:
                features = tuple(float(value) for value in row[1:])
            except ValueError:
                raise LogIntegrityError(f"Non-numeric feature in row {row}", context=f"{path}:{reader.line_num}")
            if len(features) != len(FEATURE_NAMES) or not row[0]:
                raise LogIntegrityError("Row needs a label and 10 features", context=f"{path}:{reader.line_num}")
            samples.append(Sample(features, row[0]))
    return Dataset(tuple(samples))


def write_cdf_csv(curve: CdfCurve, path: Path) -> None:
    path.parent.mkdir(parents=True, exist_ok=True)
    with open(path, "w", newline="", encoding="utf-8") as f:
        writer = csv.writer(f, lineterminator="\n")
        writer.writerow(CDF_HEADER)
        for value, probability in curve.points():
            writer.writerow([repr(value), repr(probability)])


@dataclass(frozen=True)
class FeaturizeResult:
    vectors: tuple[FeatureVector, ...]
    used: int
    skipped: int


def trace_files(traces_dir: Path) -> dict[str, list[Path]]:
    """Trace CSVs grouped by label directory, both in sorted order."""
    if not traces_dir.is_dir():
        raise NotFoundError(f"Traces directory '{traces_dir}' not found", context=str(traces_dir))
    grouped: dict[str, list[Path]] = {}
    for label_dir in sorted(p for p in traces_dir.iterdir() if p.is_dir()):
        files = sorted(label_dir.glob("*.csv"))
        if files:
            grouped[label_dir.name] = files
    return grouped


def featurize_traces(traces_dir: Path, cfg: PipelineConfig | None = None,
                     average_group: int | None = None, bin_width_ms: float = 100.0) -> FeaturizeResult:
    """Feature rows for every usable trace.

    With `average_group` k, each label's sorted iterations are averaged in
    consecutive groups of k, giving ceil(n / k) rows per label. Traces (or
    groups) left empty by zero removal are skipped with a warning.
    """
    if average_group is not None and average_group < 1:
        raise ConfigurationError(f"average_group must be at least 1, got {average_group}", context="average_group")
    cfg = cfg or PipelineConfig()
    vectors: list[FeatureVector] = []
    skipped = 0
    for label, files in trace_files(traces_dir).items():
        traces = [read_trace_csv(path, bin_width_ms) for path in files]
        size = average_group or 1
        for start in range(0, len(traces), size):
            group = traces[start:start + size]
            name = str(files[start]) if size == 1 else f"{label} iterations {start}..{start + len(group) - 1}"
            try:
                ul = average_iterations([trace.ul for trace in group])
                dl = average_iterations([trace.dl for trace in group])
                vectors.append(extract_features(ul, dl, cfg, label))
            except DegenerateTraceError as error:
                skipped += 1
                logger.warning("Skipping %s: %s", name, error.message)
    if not vectors:
        raise EmptyDataError(f"No usable traces under '{traces_dir}' ({skipped} skipped)", context=str(traces_dir))
    return FeaturizeResult(tuple(vectors), len(vectors), skipped)
