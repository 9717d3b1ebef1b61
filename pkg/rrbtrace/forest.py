"""
Decision-tree ensembles: Random Forest and Extra Trees.

Both grow unpruned CART trees on Gini impurity and vote by plurality.

Random Forest trains each tree on a bootstrap sample and, at each node, tries
the midpoints between sorted distinct values of sqrt(d) randomly chosen
features. Extra Trees trains on the full sample and draws a single uniform
threshold per chosen feature.

Tree t draws all of its randomness from SeedSequence([seed, t]), so a forest
does not depend on how many workers fit it.
"""

from __future__ import annotations

import json
import logging
import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from enum import Enum
from typing import Any, Sequence

import numpy as np

from .dataset import Dataset
from .errors import ConfigurationError, DimensionError, EmptyDataError

logger = logging.getLogger(__name__)

MODEL_FORMAT_VERSION = 1
LEAF = -1


class Variant(Enum):
    RANDOM_FOREST = "RandomForest"
    EXTRA_TREES = "ExtraTrees"


@dataclass(frozen=True)
class EnsembleConfig:
    variant: Variant = Variant.RANDOM_FOREST
    n_estimators: int = 100
    seed: int = 42
    max_features: int | None = None
    min_samples_split: int = 2
    max_depth: int | None = None
    n_jobs: int = 1

    def __post_init__(self) -> None:
        if self.n_estimators < 1:
            raise ConfigurationError("n_estimators must be at least 1", context="ensemble.n_estimators")
        if self.seed < 0:
            raise ConfigurationError("seed must be non-negative", context="ensemble.seed")
        if self.min_samples_split < 2:
            raise ConfigurationError("min_samples_split must be at least 2", context="ensemble.min_samples_split")
        if self.max_depth is not None and self.max_depth < 0:
            raise ConfigurationError("max_depth must be non-negative", context="ensemble.max_depth")
        if self.n_jobs < 1:
            raise ConfigurationError("n_jobs must be at least 1", context="ensemble.n_jobs")

    def features_per_split(self, dimension: int) -> int:
        """max_features, defaulting to floor(sqrt(d))."""
        count = self.max_features if self.max_features is not None else max(1, math.isqrt(dimension))
        if not 1 <= count <= dimension:
            raise ConfigurationError(
                f"max_features {count} outside [1, {dimension}]", context="ensemble.max_features")
        return count

    def to_dict(self) -> dict[str, Any]:
        return {
            "variant": self.variant.value,
            "n_estimators": self.n_estimators,
            "seed": self.seed,
            "max_features": self.max_features,
            "min_samples_split": self.min_samples_split,
            "max_depth": self.max_depth,
        }

    @classmethod
    def from_dict(cls, raw: dict[str, Any]) -> EnsembleConfig:
        return cls(
            variant=Variant(raw["variant"]),
            n_estimators=raw["n_estimators"],
            seed=raw["seed"],
            max_features=raw["max_features"],
            min_samples_split=raw["min_samples_split"],
            max_depth=raw["max_depth"],
        )


@dataclass(frozen=True, eq=False)
class Tree:
    """Flat node arrays; node 0 is the root and leaves have feature -1."""
    feature: np.ndarray
    threshold: np.ndarray
    left: np.ndarray
    right: np.ndarray
    counts: np.ndarray

    @property
    def node_count(self) -> int:
        return len(self.feature)

    def leaf_for(self, x: np.ndarray) -> int:
        node = 0
        while self.feature[node] != LEAF:
            node = self.left[node] if x[self.feature[node]] <= self.threshold[node] else self.right[node]
        return int(node)

    def vote(self, x: np.ndarray) -> int:
        """Majority class of the reached leaf, lowest index on ties."""
        return int(np.argmax(self.counts[self.leaf_for(x)]))

    def to_dict(self) -> dict[str, Any]:
        return {
            "feature": self.feature.tolist(),
            "threshold": self.threshold.tolist(),
            "left": self.left.tolist(),
            "right": self.right.tolist(),
            "counts": self.counts.tolist(),
        }

    @classmethod
    def from_dict(cls, raw: dict[str, Any]) -> Tree:
        return cls(
            np.asarray(raw["feature"], dtype=np.int64),
            np.asarray(raw["threshold"], dtype=np.float64),
            np.asarray(raw["left"], dtype=np.int64),
            np.asarray(raw["right"], dtype=np.int64),
            np.asarray(raw["counts"], dtype=np.int64),
        )


@dataclass(frozen=True, eq=False)
class ForestModel:
    config: EnsembleConfig
    labels: tuple[str, ...]
    n_features: int
    trees: tuple[Tree, ...]


def gini(counts: np.ndarray) -> float:
    total = counts.sum()
    if total == 0:
        return 0.0
    p = counts / total
    return float(1.0 - np.sum(p ** 2))


def best_gini_split(column: np.ndarray, y: np.ndarray, n_classes: int) -> tuple[float, float] | None:
    """Best midpoint threshold on one feature as (threshold, impurity decrease).

    Candidates are midpoints between consecutive distinct sorted values; the
    first candidate wins ties. None when the feature is constant.
    """
    order = np.argsort(column, kind="stable")
    values, labels = column[order], y[order]
    changes = np.flatnonzero(values[:-1] != values[1:])
    if changes.size == 0:
        return None
    n = values.size
    one_hot = np.zeros((n, n_classes), dtype=np.float64)
    one_hot[np.arange(n), labels] = 1.0
    cumulative = np.cumsum(one_hot, axis=0)
    left = cumulative[changes]
    right = cumulative[-1] - left
    n_left = (changes + 1).astype(np.float64)
    n_right = n - n_left
    gini_left = 1.0 - np.sum((left / n_left[:, None]) ** 2, axis=1)
    gini_right = 1.0 - np.sum((right / n_right[:, None]) ** 2, axis=1)
    gains = gini(cumulative[-1]) - (n_left * gini_left + n_right * gini_right) / n
    best = int(np.argmax(gains))
    low, high = values[changes[best]], values[changes[best] + 1]
    threshold = (low + high) / 2.0
    if threshold >= high:
        threshold = low
    return float(threshold), float(gains[best])


def split_gain(column: np.ndarray, y: np.ndarray, threshold: float, n_classes: int) -> float:
    mask = column <= threshold
    n = y.size
    left = np.bincount(y[mask], minlength=n_classes)
    right = np.bincount(y[~mask], minlength=n_classes)
    return float(gini(left + right) - (left.sum() * gini(left) + right.sum() * gini(right)) / n)


class _TreeBuilder:
    def __init__(self, config: EnsembleConfig, n_classes: int, max_features: int,
                 rng: np.random.Generator):
        self.config = config
        self.n_classes = n_classes
        self.max_features = max_features
        self.rng = rng
        self.feature: list[int] = []
        self.threshold: list[float] = []
        self.left: list[int] = []
        self.right: list[int] = []
        self.counts: list[np.ndarray] = []

    def _new_node(self, counts: np.ndarray) -> int:
        self.feature.append(LEAF)
        self.threshold.append(0.0)
        self.left.append(LEAF)
        self.right.append(LEAF)
        self.counts.append(counts)
        return len(self.feature) - 1

    def _find_split(self, X: np.ndarray, y: np.ndarray) -> tuple[int, float] | None:
        best: tuple[float, int, float] | None = None
        visited = 0
        for f in self.rng.permutation(X.shape[1]):
            if visited >= self.max_features:
                break
            column = X[:, f]
            low, high = column.min(), column.max()
            if low == high:
                continue
            visited += 1
            if self.config.variant is Variant.RANDOM_FOREST:
                found = best_gini_split(column, y, self.n_classes)
                if found is None:
                    continue
                threshold, gain = found
            else:
                threshold = float(self.rng.uniform(low, high))
                gain = split_gain(column, y, threshold, self.n_classes)
            if best is None or gain > best[0]:
                best = (gain, int(f), threshold)
        return None if best is None else (best[1], best[2])

    def grow(self, X: np.ndarray, y: np.ndarray, depth: int = 0) -> int:
        counts = np.bincount(y, minlength=self.n_classes)
        node = self._new_node(counts)
        if (np.count_nonzero(counts) <= 1 or y.size < self.config.min_samples_split
                or (self.config.max_depth is not None and depth >= self.config.max_depth)):
            return node
        split = self._find_split(X, y)
        if split is None:
            return node
        feature, threshold = split
        mask = X[:, feature] <= threshold
        if mask.all() or not mask.any():
            return node
        self.feature[node] = feature
        self.threshold[node] = threshold
        self.left[node] = self.grow(X[mask], y[mask], depth + 1)
        self.right[node] = self.grow(X[~mask], y[~mask], depth + 1)
        return node

    def build(self) -> Tree:
        return Tree(
            np.asarray(self.feature, dtype=np.int64),
            np.asarray(self.threshold, dtype=np.float64),
            np.asarray(self.left, dtype=np.int64),
            np.asarray(self.right, dtype=np.int64),
            np.stack(self.counts).astype(np.int64),
        )


def tree_rng(seed: int, tree_index: int) -> np.random.Generator:
    return np.random.Generator(np.random.PCG64(np.random.SeedSequence([seed, tree_index])))


def _fit_tree(X: np.ndarray, y: np.ndarray, config: EnsembleConfig, n_classes: int,
              max_features: int, tree_index: int) -> Tree:
    rng = tree_rng(config.seed, tree_index)
    if config.variant is Variant.RANDOM_FOREST:
        sample = rng.integers(0, y.size, size=y.size)
        X, y = X[sample], y[sample]
    builder = _TreeBuilder(config, n_classes, max_features, rng)
    builder.grow(X, y)
    tree = builder.build()
    logger.debug("Tree %d: %d nodes", tree_index, tree.node_count)
    return tree


def fit(ds: Dataset, cfg: EnsembleConfig | None = None) -> ForestModel:
    cfg = cfg or EnsembleConfig()
    if len(ds) == 0:
        raise EmptyDataError("Cannot train on an empty dataset", context="fit")
    if ds.dimension == 0:
        raise DimensionError("Cannot train on zero-dimensional features", context="fit")
    canonical = ds.canonical()
    labels = canonical.labels
    X, y = canonical.matrix()
    max_features = cfg.features_per_split(canonical.dimension)
    logger.info("Fitting %s with %d trees on %d rows, %d classes",
                cfg.variant.value, cfg.n_estimators, len(canonical), len(labels))

    def one(index: int) -> Tree:
        return _fit_tree(X, y, cfg, len(labels), max_features, index)

    if cfg.n_jobs == 1:
        trees = [one(index) for index in range(cfg.n_estimators)]
    else:
        with ThreadPoolExecutor(max_workers=cfg.n_jobs) as pool:
            trees = list(pool.map(one, range(cfg.n_estimators)))
    return ForestModel(cfg, labels, canonical.dimension, tuple(trees))


def _check_dimension(model: ForestModel, x: np.ndarray) -> None:
    if x.shape[-1] != model.n_features:
        raise DimensionError(f"Model expects {model.n_features} features, got {x.shape[-1]}", context="predict")


def predict_index(model: ForestModel, features: Sequence[float] | np.ndarray) -> int:
    x = np.asarray(features, dtype=np.float64)
    _check_dimension(model, x)
    votes = np.bincount([tree.vote(x) for tree in model.trees], minlength=len(model.labels))
    return int(np.argmax(votes))


def predict(model: ForestModel, features: Sequence[float] | np.ndarray) -> str:
    """Plurality vote of the trees; ties go to the label listed first."""
    return model.labels[predict_index(model, features)]


def predict_many(model: ForestModel, rows: Sequence[Sequence[float]] | np.ndarray) -> list[str]:
    return [predict(model, row) for row in np.asarray(rows, dtype=np.float64)]


def feature_importances(model: ForestModel) -> np.ndarray:
    """Mean decrease in Gini impurity per feature, normalized to sum to 1."""
    total = np.zeros(model.n_features, dtype=np.float64)
    for tree in model.trees:
        per_tree = np.zeros(model.n_features, dtype=np.float64)
        root_size = tree.counts[0].sum()
        for node in range(tree.node_count):
            feature = tree.feature[node]
            if feature == LEAF:
                continue
            left, right = tree.counts[tree.left[node]], tree.counts[tree.right[node]]
            decrease = (tree.counts[node].sum() * gini(tree.counts[node])
                        - left.sum() * gini(left) - right.sum() * gini(right))
            per_tree[feature] += decrease / root_size
        if per_tree.sum() > 0:
            total += per_tree / per_tree.sum()
    return total / total.sum() if total.sum() > 0 else total


def model_to_json(model: ForestModel) -> str:
    document = {
        "format_version": MODEL_FORMAT_VERSION,
        "config": model.config.to_dict(),
        "labels": list(model.labels),
        "n_features": model.n_features,
        "trees": [tree.to_dict() for tree in model.trees],
    }
    return json.dumps(document, sort_keys=True, separators=(",", ":"))


def model_from_json(text: str) -> ForestModel:
    try:
        raw = json.loads(text)
    except json.JSONDecodeError as error:
        raise ConfigurationError(f"Unreadable model: {error}", context="model")
    version = raw.get("format_version")
    if version != MODEL_FORMAT_VERSION:
        raise ConfigurationError(f"Unsupported model format version {version}", context="model.format_version")
    return ForestModel(
        EnsembleConfig.from_dict(raw["config"]),
        tuple(raw["labels"]),
        int(raw["n_features"]),
        tuple(Tree.from_dict(tree) for tree in raw["trees"]),
    )
