"""Brute-force k-nearest-neighbour classifier.

Euclidean distances to every training row, majority vote among the k
nearest. Tie rules, in order: equal distances rank by training-row index
(stable sort); vote ties go to the class of the single nearest neighbour if
it is among the tied classes, otherwise to the lowest class id.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from ..data import LabeledDataset
from ..exceptions import ShapeError


@dataclass(frozen=True)
class KnnConfig:
    k_neighbors: int

    def __post_init__(self):
        if self.k_neighbors < 1:
            raise ValueError(f"k_neighbors must be >= 1, got {self.k_neighbors}")


@dataclass(frozen=True)
class KnnModel:
    """A fitted KNN is just the training data plus k; kept for checkpoints."""

    config: KnnConfig
    grid: np.ndarray
    rows: np.ndarray
    labels: np.ndarray
    class_names: tuple

    def predict(self, queries) -> np.ndarray:
        return _predict(self.rows, self.labels, len(self.class_names),
                        self.config.k_neighbors, queries)


def knn_fit(train: LabeledDataset, config: KnnConfig) -> KnnModel:
    if config.k_neighbors > train.n_samples:
        raise ValueError(
            f"k_neighbors ({config.k_neighbors}) exceeds the training set "
            f"size ({train.n_samples})"
        )
    return KnnModel(config, train.grid, train.rows, train.labels, train.class_names)


def knn_predict(train: LabeledDataset, config: KnnConfig, queries) -> np.ndarray:
    """Class ids for each query row (see module docstring for tie rules)."""
    return knn_fit(train, config).predict(queries)


def _predict(rows, labels, num_classes, k, queries) -> np.ndarray:
    queries = np.atleast_2d(np.asarray(queries, dtype=np.float64))
    if queries.shape[1] != rows.shape[1]:
        raise ShapeError(
            f"query length {queries.shape[1]} does not match training rows "
            f"({rows.shape[1]})"
        )
    out = np.empty(queries.shape[0], dtype=np.int64)
    for qi, q in enumerate(queries):
        d2 = np.einsum("ij,ij->i", rows - q, rows - q)
        order = np.argsort(d2, kind="stable")  # distance, then training index
        nearest = order[:k]
        votes = np.bincount(labels[nearest], minlength=num_classes)
        top = np.flatnonzero(votes == votes.max())
        if top.size == 1:
            out[qi] = top[0]
        elif labels[order[0]] in top:
            out[qi] = labels[order[0]]
        else:
            out[qi] = top[0]  # flatnonzero is ascending: lowest class id
    return out
