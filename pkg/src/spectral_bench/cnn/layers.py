"""Layer primitives for the 1D CNN.

Thin validation wrappers over the kernel backends plus the cheap elementwise
pieces that stay in NumPy regardless of backend. Activations are float64
throughout; set ``SPECTRAL_BENCH_DEBUG=1`` to assert finiteness after every
layer (off by default, it costs a pass over the data).
"""

from __future__ import annotations

import os

import numpy as np

from .. import kernels
from ..exceptions import ShapeError

_DEBUG = os.environ.get("SPECTRAL_BENCH_DEBUG") == "1"


def _checked(arr):
    if _DEBUG and not np.all(np.isfinite(arr)):
        raise FloatingPointError("non-finite values in layer output")
    return arr


def conv1d_forward(x, weights, bias):
    """Valid (no padding) cross-correlation with stride 1.

    ``x`` is (batch, in_channels, length), ``weights`` is
    (out_channels, in_channels, kernel); output length is
    ``length - kernel + 1``.
    """
    x, weights, bias = np.asarray(x), np.asarray(weights), np.asarray(bias)
    if x.ndim != 3 or weights.ndim != 3:
        raise ShapeError("conv1d expects 3-D input and weights")
    if x.shape[1] != weights.shape[1]:
        raise ShapeError(
            f"input has {x.shape[1]} channels, weights expect {weights.shape[1]}"
        )
    if x.shape[2] < weights.shape[2]:
        raise ShapeError(
            f"input length {x.shape[2]} is shorter than the kernel {weights.shape[2]}"
        )
    if bias.shape != (weights.shape[0],):
        raise ShapeError("bias must have one entry per output channel")
    return _checked(kernels.conv1d_forward(x, weights, bias))


def conv1d_backward(x, weights, grad_out):
    """Gradients (grad_x, grad_w, grad_b) for conv1d_forward."""
    expected_t = x.shape[2] - weights.shape[2] + 1
    if grad_out.shape != (x.shape[0], weights.shape[0], expected_t):
        raise ShapeError("grad_out shape does not match the forward output")
    return kernels.conv1d_backward(x, weights, grad_out)


def maxpool1d(x, pool_size):
    """Max over non-overlapping windows (stride = pool_size, remainder dropped).

    Returns the pooled tensor and the window-local argmax indices needed by
    the backward pass. Ties take the first (lowest-index) maximum.
    """
    x = np.asarray(x)
    if x.ndim != 3:
        raise ShapeError("maxpool1d expects a 3-D input")
    pool_size = int(pool_size)
    if pool_size < 1:
        raise ValueError(f"pool_size must be >= 1, got {pool_size}")
    if x.shape[2] < pool_size:
        raise ShapeError(
            f"input length {x.shape[2]} is shorter than pool size {pool_size}"
        )
    y, arg = kernels.maxpool1d_forward(x, pool_size)
    return _checked(y), arg


def maxpool1d_backward(grad_out, argmax, pool_size, input_length):
    return kernels.maxpool1d_backward(grad_out, argmax, pool_size, input_length)


def relu(x):
    """max(0, x), elementwise."""
    return np.maximum(np.asarray(x, dtype=np.float64), 0.0)


def dense_forward(x, weights, bias):
    """Affine map ``x @ weights.T + bias`` for a vector or a batch of rows."""
    x, weights, bias = np.asarray(x), np.asarray(weights), np.asarray(bias)
    if x.shape[-1] != weights.shape[1]:
        raise ShapeError(
            f"input width {x.shape[-1]} does not match weights ({weights.shape[1]})"
        )
    if bias.shape != (weights.shape[0],):
        raise ShapeError("bias must have one entry per output unit")
    return _checked(x @ weights.T + bias)


def softmax(z):
    """Row-wise softmax with max subtraction; strictly positive, sums to 1."""
    z = np.asarray(z, dtype=np.float64)
    shifted = z - z.max(axis=-1, keepdims=True)
    e = np.exp(shifted)
    return _checked(e / e.sum(axis=-1, keepdims=True))
