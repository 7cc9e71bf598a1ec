"""Exact t-SNE producing 2-D figure coordinates.

O(n^2) affinities are fine at this package's dataset sizes (hundreds to ~1200
rows). The optimizer follows the originally published schedule: early
exaggeration (factor 12 for the first 250 iterations), momentum 0.5 switching
to 0.8 at iteration 250, learning rate 200, per-coordinate adaptive gains,
and recentering after every step.

Each point's Gaussian bandwidth is found by bisection so its conditional
distribution matches the target perplexity within 1e-5 on the log scale.

Initial coordinates are keyed to the *content* of each row (hash of the row
bytes mixed with the seed) rather than its position, so permuting the input
rows permutes the output rows; a fixed seed is fully deterministic.
"""

from __future__ import annotations

import hashlib
from dataclasses import dataclass

import numpy as np

from . import kernels
from .rng import Rng

_PERPLEXITY_TOL = 1e-5
_BISECTION_STEPS = 50
_P_FLOOR = 1e-12


@dataclass(frozen=True)
class TsneConfig:
    perplexity: float = 30.0
    iterations: int = 1000
    learning_rate: float = 200.0
    early_exaggeration: float = 12.0
    exaggeration_iters: int = 250
    momentum_start: float = 0.5
    momentum_final: float = 0.8
    momentum_switch: int = 250
    seed: int = 0

    def __post_init__(self):
        if not self.perplexity > 1.0:
            raise ValueError(f"perplexity must exceed 1, got {self.perplexity}")
        if self.iterations < 1:
            raise ValueError("iterations must be >= 1")
        if self.learning_rate <= 0:
            raise ValueError("learning_rate must be positive")


def _conditional_probs(d2_row, beta):
    """Shift-invariant p_j|i and entropy (nats) for one point at bandwidth beta."""
    shifted = d2_row - d2_row.min()
    e = np.exp(-beta * shifted)
    z = e.sum()
    p = e / z
    entropy = np.log(z) + beta * float(e @ shifted) / z
    return p, entropy

def _bisect_bandwidth(d2_row, target_entropy):
    beta, lo, hi = 1.0, 0.0, np.inf
    p, h = _conditional_probs(d2_row, beta)
    for _ in range(_BISECTION_STEPS):
        if abs(h - target_entropy) <= _PERPLEXITY_TOL:
            break
        if h > target_entropy:  # too flat: narrow the kernel
            lo = beta
            beta = beta * 2.0 if np.isinf(hi) else (beta + hi) / 2.0
        else:
            hi = beta
            beta = (beta + lo) / 2.0
        p, h = _conditional_probs(d2_row, beta)
    return p, beta


def joint_affinities(rows, perplexity: float):
    """Symmetrized affinity matrix P (sums to 1) and the per-point bandwidths."""
    rows = np.ascontiguousarray(rows, dtype=np.float64)
    n = rows.shape[0]
    d2 = kernels.pairwise_sq_dists(rows)
    target = np.log(perplexity)
    cond = np.zeros((n, n))
    betas = np.empty(n)
    others = np.arange(n)
    for i in range(n):
        mask = others != i
        p, betas[i] = _bisect_bandwidth(d2[i, mask], target)
        cond[i, mask] = p
    p_joint = (cond + cond.T) / (2.0 * n)
    # floor, then renormalize so the matrix still sums to exactly 1
    p_joint = np.maximum(p_joint, _P_FLOOR)
    return p_joint / p_joint.sum(), betas


def _initial_embedding(rows, seed: int) -> np.ndarray:
    """N(0, 1e-4) coordinates keyed by row content and seed."""
    n = rows.shape[0]
    seed_bytes = int(seed).to_bytes(8, "little")
    y = np.empty((n, 2))
    for i in range(n):
        digest = hashlib.blake2b(
            np.ascontiguousarray(rows[i], dtype=np.float64).tobytes() + seed_bytes,
            digest_size=8,
        ).digest()
        y[i] = Rng(int.from_bytes(digest, "little")).standard_normal(2) * 1e-2
    return y


def _low_dim_q(y):
    """Student-t numerators and the normalized Q matrix."""
    d2 = kernels.pairwise_sq_dists(y)
    num = 1.0 / (1.0 + d2)
    np.fill_diagonal(num, 0.0)
    q = num / num.sum()
    return num, np.maximum(q, _P_FLOOR)


def _kl(p, q) -> float:
    return float(np.sum(p * np.log(p / q)))


def tsne_embed(rows, config: TsneConfig) -> tuple[np.ndarray, list[tuple[int, float]]]:
    """Embed rows into 2-D; returns coordinates and a KL trace.

    The trace holds (iteration, KL) pairs every 50 iterations plus the final
    state, always measured against the unexaggerated P.
    """
    rows = np.ascontiguousarray(np.atleast_2d(rows), dtype=np.float64)
    n = rows.shape[0]
    if n < 4:
        raise ValueError(f"t-SNE needs at least 4 rows, got {n}")
    if not config.perplexity < n:
        raise ValueError(
            f"perplexity ({config.perplexity}) must be smaller than the "
            f"number of rows ({n})"
        )

    p, _ = joint_affinities(rows, config.perplexity)
    y = _initial_embedding(rows, config.seed)
    velocity = np.zeros_like(y)
    gains = np.ones_like(y)

    trace: list[tuple[int, float]] = []
    for it in range(config.iterations):
        if it % 50 == 0:
            _, q = _low_dim_q(y)
            trace.append((it, _kl(p, q)))
        p_eff = p * config.early_exaggeration if it < config.exaggeration_iters else p
        d2 = kernels.pairwise_sq_dists(y)
        num = 1.0 / (1.0 + d2)
        np.fill_diagonal(num, 0.0)
        pq = (p_eff - num / num.sum()) * num
        grad = 4.0 * (pq.sum(axis=1)[:, None] * y - pq @ y)

        momentum = (config.momentum_start if it < config.momentum_switch
                    else config.momentum_final)
        same_sign = np.sign(grad) == np.sign(velocity)
        gains = np.where(same_sign, gains * 0.8, gains + 0.2)
        np.maximum(gains, 0.01, out=gains)
        velocity = momentum * velocity - config.learning_rate * gains * grad
        y = y + velocity
        y = y - y.mean(axis=0)

    _, q = _low_dim_q(y)
    trace.append((config.iterations, _kl(p, q)))
    return y, trace
