"""Pure-NumPy kernels: the fallback backend.

Same contracts as the compiled backend in ``_native.pyx``. Inputs are
guaranteed C-contiguous float64 by the dispatching wrappers; no validation
happens here.
"""

import numpy as np
from numpy.lib.stride_tricks import sliding_window_view


def conv1d_forward(x, w, b):
    # x (B, Ci, L), w (O, Ci, K), b (O,) -> y (B, O, L-K+1)
    windows = sliding_window_view(x, w.shape[2], axis=2)  # (B, Ci, T, K)
    y = np.einsum("bitk,oik->bot", windows, w, optimize=True)
    y += b[None, :, None]
    return y


def conv1d_backward(x, w, gy):
    # gy (B, O, T) -> (gx, gw, gb)
    k = w.shape[2]
    windows = sliding_window_view(x, k, axis=2)  # (B, Ci, T, K)
    gw = np.einsum("bot,bitk->oik", gy, windows, optimize=True)
    gb = gy.sum(axis=(0, 2))
    # full correlation of gy with the flipped kernel recovers gx
    gy_pad = np.pad(gy, ((0, 0), (0, 0), (k - 1, k - 1)))
    gy_windows = sliding_window_view(gy_pad, k, axis=2)  # (B, O, L, K)
    gx = np.einsum("bosk,oik->bis", gy_windows, w[:, :, ::-1], optimize=True)
    return gx, gw, gb


def maxpool1d_forward(x, pool):
    # non-overlapping windows, stride == pool, trailing remainder dropped
    b, c, length = x.shape
    t = length // pool
    xt = x[:, :, :t * pool].reshape(b, c, t, pool)
    arg = xt.argmax(axis=3)
    y = np.take_along_axis(xt, arg[..., None], axis=3)[..., 0]
    return y, arg


def maxpool1d_backward(gy, arg, pool, length):
    b, c, t = gy.shape
    gxt = np.zeros((b, c, t, pool))
    np.put_along_axis(gxt, arg[..., None], gy[..., None], axis=3)
    gx = np.zeros((b, c, length))
    gx[:, :, :t * pool] = gxt.reshape(b, c, t * pool)
    return gx


def pairwise_sq_dists(x):
    # (n, p) -> (n, n) squared Euclidean distances, exact zeros on the diagonal
    sq = np.einsum("ij,ij->i", x, x)
    d = sq[:, None] + sq[None, :] - 2.0 * (x @ x.T)
    np.maximum(d, 0.0, out=d)
    np.fill_diagonal(d, 0.0)
    return d
