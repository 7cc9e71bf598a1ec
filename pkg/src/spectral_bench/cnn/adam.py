"""Adam optimizer with bias correction.

Standard defaults (beta1=0.9, beta2=0.999, eps=1e-8); the step count
increments once per call, and the epsilon sits outside the square root, so
the first step moves each weight by about ``-lr * g / (|g| + eps)``.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from ..exceptions import ShapeError


@dataclass
class AdamState:
    """First/second moment accumulators, one pair per parameter tensor."""

    m: dict
    v: dict
    t: int = 0
    beta1: float = 0.9
    beta2: float = 0.999
    eps: float = 1e-8

    @classmethod
    def for_params(cls, params: dict) -> "AdamState":
        return cls(m={k: np.zeros_like(p) for k, p in params.items()},
                   v={k: np.zeros_like(p) for k, p in params.items()})


def adam_step(params: dict, grads: dict, state: AdamState, lr: float):
    """Update ``params`` in place from ``grads``; advances ``state.t`` by one."""
    if set(grads) != set(params):
        raise ShapeError("gradient keys do not match parameter keys")
    state.t += 1
    b1, b2 = state.beta1, state.beta2
    bc1 = 1.0 - b1 ** state.t
    bc2 = 1.0 - b2 ** state.t
    for name, p in params.items():
        g = grads[name]
        if g.shape != p.shape:
            raise ShapeError(f"gradient shape {g.shape} != parameter shape "
                             f"{p.shape} for {name!r}")
        m = state.m[name]
        v = state.v[name]
        m *= b1
        m += (1.0 - b1) * g
        v *= b2
        v += (1.0 - b2) * np.square(g)
        p -= lr * (m / bc1) / (np.sqrt(v / bc2) + state.eps)
