"""Numerical kernels with a compiled fast path.

Two interchangeable backends implement the hot loops (1D convolution forward
and backward, max pooling, pairwise squared distances):

* ``native`` - a Cython extension compiled at install time;
* ``numpy``  - a pure-NumPy fallback, always available.

Selection happens once at import: the native backend is used when its
extension module importable, otherwise the fallback. Override with the
environment variable ``SPECTRAL_BENCH_KERNELS=native|numpy|auto`` (``native``
raises if the extension is missing). ``benchmarks/bench_kernels.py`` compares
the two.

Both backends are deterministic; they may differ from one another in the
last floating-point bits because summation order differs.
"""

import os

import numpy as np

from . import _numpy

_requested = os.environ.get("SPECTRAL_BENCH_KERNELS", "auto").lower()
if _requested not in ("auto", "native", "numpy"):
    raise ValueError(
        f"SPECTRAL_BENCH_KERNELS must be auto, native, or numpy, got {_requested!r}"
    )

if _requested == "numpy":
    _impl = _numpy
    BACKEND = "numpy"
else:
    try:
        from . import _native as _impl
        BACKEND = "native"
    except ImportError:
        if _requested == "native":
            raise ImportError(
                "SPECTRAL_BENCH_KERNELS=native but the compiled extension is "
                "not available; reinstall with a C toolchain present"
            ) from None
        _impl = _numpy
        BACKEND = "numpy"


def get_backend(name: str = None):
    """Return a backend module by name (default: the selected one)."""
    if name is None or name == BACKEND:
        return _impl
    if name == "numpy":
        return _numpy
    if name == "native":
        from . import _native
        return _native
    raise ValueError(f"unknown kernel backend {name!r}")


def _c64(a):
    return np.ascontiguousarray(a, dtype=np.float64)


def conv1d_forward(x, w, b):
    """Valid cross-correlation: out[b,o,t] = bias[o] + sum w[o,i,k] x[b,i,t+k]."""
    return _impl.conv1d_forward(_c64(x), _c64(w), _c64(b))


def conv1d_backward(x, w, gy):
    """Gradients (gx, gw, gb) of a conv1d_forward output gradient ``gy``."""
    return _impl.conv1d_backward(_c64(x), _c64(w), _c64(gy))


def maxpool1d_forward(x, pool):
    """Non-overlapping window max with per-window argmax (first max wins)."""
    return _impl.maxpool1d_forward(_c64(x), int(pool))


def maxpool1d_backward(gy, arg, pool, length):
    """Route pooled gradients back to the recorded argmax positions."""
    return _impl.maxpool1d_backward(
        _c64(gy), np.ascontiguousarray(arg, dtype=np.int64), int(pool), int(length)
    )


def pairwise_sq_dists(x):
    """Squared Euclidean distance matrix with a zero diagonal."""
    return _impl.pairwise_sq_dists(_c64(np.atleast_2d(x)))
