"""Savitzky-Golay smoothing and derivative filtering.

The filter slides a window of odd length over the signal, fits a least-squares
polynomial of the given degree to the samples in the window, and outputs the
requested derivative of that fit at the window centre. Weights are obtained
from a QR factorization of the window's Vandermonde design matrix (better
conditioned than the explicit normal equations at degree 3-5).

Edge handling preserves length: the first and last half-window points are the
polynomial fitted to the first/last full window, evaluated at the off-centre
offsets.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from numpy.lib.stride_tricks import sliding_window_view

from .data import LabeledDataset, Spectrum


@dataclass(frozen=True)
class SgFilterSpec:
    """Window length, polynomial degree, derivative order, sample spacing.

    ``deriv_order=0`` smooths; ``deriv_order=d`` outputs the d-th derivative
    of the local fit, scaled by ``delta**-d`` (``delta`` is the sample
    spacing, default 1 so derivatives are in index units).
    """

    window: int
    degree: int
    deriv_order: int = 0
    delta: float = 1.0

    def __post_init__(self):
        if self.window < 3 or self.window % 2 == 0:
            raise ValueError(f"window must be an odd integer >= 3, got {self.window}")
        if self.degree < 0:
            raise ValueError(f"degree must be nonnegative, got {self.degree}")
        if self.degree >= self.window:
            raise ValueError(
                f"degree ({self.degree}) must be smaller than window ({self.window})"
            )
        if not 0 <= self.deriv_order <= self.degree:
            raise ValueError(
                f"deriv_order ({self.deriv_order}) must lie in [0, degree={self.degree}]"
            )
        if not self.delta > 0:
            raise ValueError(f"delta must be positive, got {self.delta}")

    @property
    def half(self) -> int:
        return (self.window - 1) // 2


def _design_pinv(window: int, degree: int) -> np.ndarray:
    """Pseudoinverse of the window's Vandermonde design matrix, via QR.

    Column m of the design matrix holds (j - h)**m for window offsets j,
    h the centre. Row m of the result maps window samples to the m-th
    polynomial coefficient of the least-squares fit.
    """
    offsets = np.arange(window, dtype=np.float64) - (window - 1) / 2.0
    design = np.vander(offsets, N=degree + 1, increasing=True)
    q, r = np.linalg.qr(design)
    return np.linalg.solve(r, q.T)


def _eval_weights(spec: SgFilterSpec, t_eval: float) -> np.ndarray:
    """Weights w with w . window = d-th derivative of the fit at offset t_eval."""
    pinv = _design_pinv(spec.window, spec.degree)
    d = spec.deriv_order
    w = np.zeros(spec.window)
    for m in range(d, spec.degree + 1):
        coeff = math.factorial(m) / math.factorial(m - d) * t_eval ** (m - d)
        w += coeff * pinv[m]
    return w / spec.delta**d


def sg_coefficients(spec: SgFilterSpec) -> np.ndarray:
    """Filter weights for the window centre.

    ``c[j]`` multiplies the sample at offset ``j - h`` from the centre
    (h = (window-1)/2), so applying the filter is a sliding dot product.
    For ``deriv_order=0`` the weights are symmetric and sum to 1; for
    ``deriv_order>=1`` they sum to 0.
    """
    return _eval_weights(spec, 0.0)


def _filter_rows(rows: np.ndarray, spec: SgFilterSpec, *, what: str) -> np.ndarray:
    n = rows.shape[1]
    if n < spec.window:
        raise ValueError(
            f"{what} has {n} samples, shorter than the filter window {spec.window}"
        )
    h = spec.half
    center = sg_coefficients(spec)
    out = np.empty_like(rows)
    # interior: sliding dot product with the centre weights
    out[:, h:n - h] = sliding_window_view(rows, spec.window, axis=1) @ center
    # edges: evaluate the first/last window's fit at off-centre offsets
    for t in range(h):
        left = _eval_weights(spec, t - h)
        out[:, t] = rows[:, :spec.window] @ left
        right = _eval_weights(spec, h - t)
        out[:, n - 1 - t] = rows[:, n - spec.window:] @ right
    return out


def apply_sg(data, spec: SgFilterSpec):
    """Apply the filter to a :class:`Spectrum` or every row of a dataset.

    Length, grid, and labels are preserved. Raises ``ValueError`` naming the
    offending row when it is shorter than the window.
    """
    if isinstance(data, LabeledDataset):
        return data.with_rows(_filter_rows(data.rows, spec, what="each row"))
    if isinstance(data, Spectrum):
        filtered = _filter_rows(data.absorbances[None, :], spec, what="the spectrum")
        return Spectrum(data.wavelengths, filtered[0], data.unit)
    raise TypeError(f"expected Spectrum or LabeledDataset, got {type(data).__name__}")
