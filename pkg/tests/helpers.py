"""Independent oracles and small builders shared across the test modules.

Everything here is deliberately naive (triple loops, exhaustive sorts,
central differences, Lloyd's algorithm) so it stays independent of the
library code paths it checks.
"""

import numpy as np

from spectral_bench.data import LabeledDataset


def naive_conv1d(x, w, b):
    """Triple-loop valid cross-correlation."""
    nb, ci, length = x.shape
    co, _, k = w.shape
    t_out = length - k + 1
    y = np.zeros((nb, co, t_out))
    for bi in range(nb):
        for o in range(co):
            for t in range(t_out):
                acc = b[o]
                for i in range(ci):
                    for tau in range(k):
                        acc += w[o, i, tau] * x[bi, i, t + tau]
                y[bi, o, t] = acc
    return y


def naive_maxpool(x, pool):
    """Brute-force window maximum (stride = pool, remainder dropped)."""
    nb, c, length = x.shape
    t_out = length // pool
    y = np.zeros((nb, c, t_out))
    for bi in range(nb):
        for ci in range(c):
            for t in range(t_out):
                y[bi, ci, t] = max(x[bi, ci, t * pool + j] for j in range(pool))
    return y


def knn_oracle(train_rows, train_labels, num_classes, k, query):
    """Exhaustive sort by (distance, training index) plus the vote tie rules."""
    d2 = [(float(np.sum((row - query) ** 2)), idx)
          for idx, row in enumerate(train_rows)]
    d2.sort()
    nearest = [train_labels[idx] for _, idx in d2[:k]]
    votes = [0] * num_classes
    for lab in nearest:
        votes[lab] += 1
    best = max(votes)
    tied = [c for c, v in enumerate(votes) if v == best]
    if len(tied) == 1:
        return tied[0]
    if nearest[0] in tied:
        return nearest[0]
    return tied[0]


def fd_gradients(loss_fn, params, step=1e-4):
    """Central finite differences of loss_fn with respect to every entry."""
    grads = {}
    for name, p in params.items():
        g = np.zeros_like(p)
        flat, gflat = p.ravel(), g.ravel()
        for i in range(flat.size):
            orig = flat[i]
            flat[i] = orig + step
            hi = loss_fn()
            flat[i] = orig - step
            lo = loss_fn()
            flat[i] = orig
            gflat[i] = (hi - lo) / (2.0 * step)
        grads[name] = g
    return grads


def relative_error(a, b):
    """max |a-b| / max(1, |a|, |b|), elementwise, reduced to a scalar."""
    denom = np.maximum(1.0, np.maximum(np.abs(a), np.abs(b)))
    return float(np.max(np.abs(a - b) / denom))


def kmeans2(points, seed, restarts=10, iters=50):
    """Plain Lloyd 2-means; returns the best-inertia assignment."""
    gen = np.random.default_rng(seed)
    n = points.shape[0]
    best_assign, best_inertia = None, np.inf
    for _ in range(restarts):
        centers = points[gen.choice(n, size=2, replace=False)].copy()
        for _ in range(iters):
            d = ((points[:, None, :] - centers[None, :, :]) ** 2).sum(axis=2)
            assign = d.argmin(axis=1)
            for c in range(2):
                if np.any(assign == c):
                    centers[c] = points[assign == c].mean(axis=0)
        inertia = float(((points - centers[assign]) ** 2).sum())
        if inertia < best_inertia:
            best_inertia, best_assign = inertia, assign
    return best_assign


def separable_dataset(n_per_class=10, length=40, noise=0.2, offset=1.0, seed=7):
    """Two tight classes: means differ by `offset` (= 5 sigma at defaults)."""
    gen = np.random.default_rng(seed)
    grid = np.arange(length, dtype=float)
    base = np.sin(grid / 6.0)
    bump = np.zeros(length)
    bump[length // 4: 3 * length // 4] = offset
    rows, labels = [], []
    for cls, mean in enumerate((base, base + bump)):
        for _ in range(n_per_class):
            rows.append(mean + gen.normal(0.0, noise, size=length))
            labels.append(cls)
    return LabeledDataset(grid, np.vstack(rows), labels, ("a", "b"))


def random_dataset(n=24, length=12, num_classes=2, seed=3):
    gen = np.random.default_rng(seed)
    labels = np.concatenate([np.arange(num_classes),
                             gen.integers(0, num_classes, size=n - num_classes)])
    rows = gen.standard_normal((n, length)) + labels[:, None]
    return LabeledDataset(np.arange(length, dtype=float), rows, labels,
                          tuple(chr(ord("a") + c) for c in range(num_classes)))
