"""Held-out evaluation of a forest: accuracy, per-class and macro-averaged precision/recall/F1."""

from __future__ import annotations

import json
from dataclasses import dataclass
from typing import Any

import numpy as np

from .dataset import Dataset
from .errors import EmptyDataError
from .forest import ForestModel, predict


@dataclass(frozen=True)
class ClassMetrics:
    label: str
    precision: float
    recall: float
    f1: float
    support: int


def _f1(precision: float, recall: float) -> float:
    total = precision + recall
    return 0.0 if total == 0 else 2 * precision * recall / total


@dataclass(frozen=True)
class MetricsReport:
    """Held-out scores of one model.

    `lowest_f1_label` is the weakest of the model's training labels; on a tie the
    label that comes first in the model's label order wins.
    """
    accuracy: float
    per_class: tuple[ClassMetrics, ...]
    macro_precision: float
    macro_recall: float
    macro_f1: float
    lowest_f1: float
    lowest_f1_label: str
    labels: tuple[str, ...]
    confusion: tuple[tuple[int, ...], ...]

    def to_dict(self) -> dict[str, Any]:
        return {
            "accuracy": self.accuracy,
            "macro_precision": self.macro_precision,
            "macro_recall": self.macro_recall,
            "macro_f1": self.macro_f1,
            "lowest_f1": {"label": self.lowest_f1_label, "f1": self.lowest_f1},
            "per_class": [
                {"label": m.label, "precision": m.precision, "recall": m.recall, "f1": m.f1, "support": m.support}
                for m in self.per_class
            ],
            "labels": list(self.labels),
            "confusion": [list(row) for row in self.confusion],
        }

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), indent=2, sort_keys=True) + "\n"

    def format_table(self) -> str:
        width = max(len("class"), *(len(m.label) for m in self.per_class))
        lines = [f"{'class':<{width}}  precision  recall     f1  support"]
        for m in self.per_class:
            lines.append(f"{m.label:<{width}}  {m.precision:9.3f}  {m.recall:6.3f}  {m.f1:5.3f}  {m.support:7d}")
        lines.append("")
        lines.append(f"{'macro':<{width}}  {self.macro_precision:9.3f}  {self.macro_recall:6.3f}  {self.macro_f1:5.3f}")
        lines.append(f"accuracy {self.accuracy:.3f}, lowest F1 {self.lowest_f1:.3f} ({self.lowest_f1_label})")
        return "\n".join(lines)


def confusion_matrix(actual: list[int], predicted: list[int], size: int) -> np.ndarray:
    """Rows are true classes, columns predicted classes."""
    matrix = np.zeros((size, size), dtype=np.int64)
    np.add.at(matrix, (np.asarray(actual, dtype=np.int64), np.asarray(predicted, dtype=np.int64)), 1)
    return matrix


def evaluate(model: ForestModel, test: Dataset) -> MetricsReport:
    """Score the model on a test set.

    Macro averages run over the model's training labels. Test labels the model
    never saw are appended to the confusion matrix but excluded from the means.
    """
    if len(test) == 0:
        raise EmptyDataError("Cannot evaluate on an empty test set", context="evaluate")
    labels = list(model.labels)
    for label in test.labels:
        if label not in labels:
            labels.append(label)
    index = {label: i for i, label in enumerate(labels)}

    actual = [index[sample.label] for sample in test.samples]
    predicted = [index[predict(model, sample.features)] for sample in test.samples]
    matrix = confusion_matrix(actual, predicted, len(labels))

    true_positive = np.diag(matrix).astype(np.float64)
    predicted_totals = matrix.sum(axis=0).astype(np.float64)
    actual_totals = matrix.sum(axis=1).astype(np.float64)
    precision = np.divide(true_positive, predicted_totals, out=np.zeros_like(true_positive),
                          where=predicted_totals > 0)
    recall = np.divide(true_positive, actual_totals, out=np.zeros_like(true_positive), where=actual_totals > 0)

    per_class = tuple(
        ClassMetrics(label, float(precision[i]), float(recall[i]),
                     _f1(float(precision[i]), float(recall[i])), int(actual_totals[i]))
        for i, label in enumerate(labels)
    )
    scored = per_class[:len(model.labels)]
    lowest = min(scored, key=lambda m: m.f1)
    return MetricsReport(
        accuracy=float(true_positive.sum() / len(test)),
        per_class=per_class,
        macro_precision=float(np.mean([m.precision for m in scored])),
        macro_recall=float(np.mean([m.recall for m in scored])),
        macro_f1=float(np.mean([m.f1 for m in scored])),
        lowest_f1=lowest.f1,
        lowest_f1_label=lowest.label,
        labels=tuple(labels),
        confusion=tuple(tuple(int(v) for v in row) for row in matrix),
    )
