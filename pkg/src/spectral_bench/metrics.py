"""Confusion matrices and diagnosis metrics.

Rows of the confusion matrix are true classes, columns are predictions.
For binary problems class 1 is the positive class, so specificity is
TN/(TN+FP) and sensitivity (recall) is TP/(TP+FN). Multiclass matrices are
scored one-vs-rest and macro-averaged; this extension beyond the binary
definitions is documented here and in the report metadata.

A metric with an empty denominator is *undefined* and reported as None
(serialized as null), never as zero.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np


@dataclass(frozen=True)
class ConfusionMatrix:
    counts: np.ndarray

    def __post_init__(self):
        counts = np.asarray(self.counts, dtype=np.int64)
        if counts.ndim != 2 or counts.shape[0] != counts.shape[1]:
            raise ValueError("confusion matrix must be square")
        if counts.shape[0] < 2:
            raise ValueError("confusion matrix needs at least two classes")
        if np.any(counts < 0):
            raise ValueError("confusion counts must be nonnegative")
        object.__setattr__(self, "counts", counts)

    @property
    def num_classes(self) -> int:
        return self.counts.shape[0]

    @property
    def total(self) -> int:
        return int(self.counts.sum())


@dataclass(frozen=True)
class DiagnosisMetrics:
    accuracy: float
    specificity: float | None
    sensitivity: float | None

    def as_dict(self) -> dict:
        return {"accuracy": self.accuracy, "specificity": self.specificity,
                "sensitivity": self.sensitivity}


def confusion(preds, labels, num_classes: int) -> ConfusionMatrix:
    """Count (true, predicted) pairs into a num_classes x num_classes matrix."""
    preds = np.asarray(preds, dtype=np.int64)
    labels = np.asarray(labels, dtype=np.int64)
    if preds.shape != labels.shape or preds.ndim != 1:
        raise ValueError("preds and labels must be equal-length vectors")
    if preds.size == 0:
        raise ValueError("cannot build a confusion matrix from no predictions")
    for name, ids in (("preds", preds), ("labels", labels)):
        if ids.min() < 0 or ids.max() >= num_classes:
            raise ValueError(f"{name} contain ids outside [0, {num_classes})")
    counts = np.zeros((num_classes, num_classes), dtype=np.int64)
    np.add.at(counts, (labels, preds), 1)
    return ConfusionMatrix(counts)


def _ratio(num: float, den: float) -> float | None:
    return None if den == 0 else float(num / den)


def diagnosis_metrics(matrix: ConfusionMatrix) -> DiagnosisMetrics:
    """Accuracy, specificity, sensitivity from a confusion matrix.

    Binary matrices use the definitions directly; larger ones macro-average
    the one-vs-rest values over classes where they are defined.
    """
    m = matrix.counts
    total = matrix.total
    if total == 0:
        raise ValueError("confusion matrix is all zeros")
    accuracy = float(np.trace(m) / total)
    if matrix.num_classes == 2:
        tn, fp = int(m[0, 0]), int(m[0, 1])
        fn, tp = int(m[1, 0]), int(m[1, 1])
        return DiagnosisMetrics(accuracy, _ratio(tn, tn + fp), _ratio(tp, tp + fn))
    specs, senss = [], []
    for c in range(matrix.num_classes):
        tp = int(m[c, c])
        fn = int(m[c].sum()) - tp
        fp = int(m[:, c].sum()) - tp
        tn = total - tp - fn - fp
        if tn + fp > 0:
            specs.append(tn / (tn + fp))
        if tp + fn > 0:
            senss.append(tp / (tp + fn))
    return DiagnosisMetrics(
        accuracy,
        float(np.mean(specs)) if specs else None,
        float(np.mean(senss)) if senss else None,
    )
