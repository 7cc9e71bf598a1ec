"""Cross-entropy loss, plain and class-weighted."""

from __future__ import annotations

import numpy as np

from ..exceptions import ShapeError

# probabilities are clamped here before the log
PROB_FLOOR = 1e-12


def cross_entropy(pa, pb) -> float:
    """-sum_i pa_i * log(pb_i) for a single prediction.

    ``pa`` is the reference distribution: one-hot for the plain loss, or
    one-hot times a class weight for the weighted variant. ``pb`` must be a
    probability vector (strictly positive after clamping at 1e-12, summing
    to 1 within 1e-9).
    """
    pa = np.asarray(pa, dtype=np.float64)
    pb = np.asarray(pb, dtype=np.float64)
    if pa.shape != pb.shape or pa.ndim != 1:
        raise ShapeError(f"pa {pa.shape} and pb {pb.shape} must be equal-length vectors")
    if abs(pb.sum() - 1.0) > 1e-9:
        raise ValueError("pb must sum to 1 within 1e-9")
    if np.any(pb < 0):
        raise ValueError("pb must be nonnegative")
    return float(-(pa * np.log(np.maximum(pb, PROB_FLOOR))).sum())


def class_weights(labels, num_classes: int) -> np.ndarray:
    """Inverse-frequency weights: n_total / (C * n_class).

    Classes absent from ``labels`` get weight 0; they contribute nothing to a
    batch loss anyway.
    """
    counts = np.bincount(np.asarray(labels, dtype=np.int64), minlength=num_classes)
    n = counts.sum()
    return np.where(counts > 0, n / (num_classes * np.maximum(counts, 1)), 0.0)


def batch_cross_entropy(probs, labels, weights=None) -> float:
    """Mean cross-entropy of predicted probability rows against integer labels."""
    probs = np.asarray(probs, dtype=np.float64)
    labels = np.asarray(labels, dtype=np.int64)
    if probs.ndim != 2 or probs.shape[0] != labels.shape[0]:
        raise ShapeError("probs must be (batch, classes) matching labels")
    picked = np.maximum(probs[np.arange(labels.size), labels], PROB_FLOOR)
    losses = -np.log(picked)
    if weights is not None:
        losses = losses * np.asarray(weights)[labels]
    return float(losses.mean())
