"""k-fold partitions for cross-validation.

Folds are plain shuffled splits by default: shuffle all sample indices, then
cut the permutation into k contiguous blocks whose sizes differ by at most
one. An optional stratified mode deals shuffled per-class indices round-robin
instead; it is off by default.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .rng import Rng


@dataclass(frozen=True)
class FoldPlan:
    """A disjoint cover of ``range(n)`` by k folds (sizes differ by <= 1)."""

    folds: tuple[tuple[int, ...], ...]
    n: int
    seed: int
    stratified: bool = False

    @property
    def k(self) -> int:
        return len(self.folds)

    def test_indices(self, fold: int) -> np.ndarray:
        return np.asarray(self.folds[fold], dtype=np.int64)

    def train_indices(self, fold: int) -> np.ndarray:
        """All indices outside ``fold``, in ascending order."""
        mask = np.ones(self.n, dtype=bool)
        mask[self.test_indices(fold)] = False
        return np.flatnonzero(mask)


def shuffled_fold_indices(n: int, k: int, rng: Rng, *, labels=None,
                          stratified: bool = False) -> FoldPlan:
    """Shuffle ``n`` sample indices and split them into ``k`` folds.

    Parameters
    ----------
    n, k : int
        Sample count and fold count, with ``2 <= k <= n``.
    rng : Rng
        Source of the permutation.
    labels : array-like, optional
        Class ids, required when ``stratified=True``.
    stratified : bool
        If set, spread each class across folds (round-robin over the
        shuffled, class-grouped order). Fold sizes still differ by <= 1.
    """
    n, k = int(n), int(k)
    if k < 2:
        raise ValueError(f"k must be at least 2, got {k}")
    if k > n:
        raise ValueError(f"k ({k}) exceeds the number of samples ({n})")

    perm = rng.permutation(n)
    if stratified:
        if labels is None:
            raise ValueError("stratified folds require labels")
        labels = np.asarray(labels, dtype=np.int64)
        if labels.shape != (n,):
            raise ValueError("labels must have one entry per sample")
        # group the shuffled order by class, then deal sequentially
        order = np.concatenate(
            [perm[labels[perm] == c] for c in np.unique(labels)]
        )
        folds = [order[f::k] for f in range(k)]
    else:
        base, extra = divmod(n, k)
        sizes = [base + 1] * extra + [base] * (k - extra)
        bounds = np.cumsum([0] + sizes)
        folds = [perm[bounds[f]:bounds[f + 1]] for f in range(k)]

    return FoldPlan(tuple(tuple(int(i) for i in f) for f in folds),
                    n=n, seed=rng.seed, stratified=stratified)
