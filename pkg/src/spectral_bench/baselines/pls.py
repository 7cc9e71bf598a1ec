"""PLS-DA: partial least squares regression on one-hot class indicators.

Components are extracted with the NIPALS algorithm (iterative weight/score/
loading extraction with rank-one deflation of both blocks). Data are
mean-centered only; no unit-variance scaling. The component count is the
smallest one whose cumulative explained variance reaches the target
(X-block variance by default, Y-block optionally), capped at
``max_components``. Classification takes the argmax of the regressed
indicator responses.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from ..data import LabeledDataset
from ..exceptions import ShapeError

# inner-iteration convergence of the score vector, relative to its norm
NIPALS_TOL = 1e-10
NIPALS_MAX_ITER = 500


@dataclass(frozen=True)
class PlsModel:
    """Everything needed to score new rows through the fitted components."""

    x_mean: np.ndarray
    y_mean: np.ndarray
    weights: np.ndarray            # (p, c) X-block weights, unit norm
    x_loadings: np.ndarray         # (p, c)
    y_loadings: np.ndarray         # (C, c)
    rotation: np.ndarray           # (p, c) scores basis: T = Xc @ rotation
    explained_x_variance: np.ndarray
    class_names: tuple

    @property
    def n_components(self) -> int:
        return self.weights.shape[1]

    def transform(self, rows) -> np.ndarray:
        rows = np.atleast_2d(np.asarray(rows, dtype=np.float64))
        if rows.shape[1] != self.x_mean.size:
            raise ShapeError(
                f"row length {rows.shape[1]} does not match training "
                f"({self.x_mean.size})"
            )
        return (rows - self.x_mean) @ self.rotation

    def responses(self, rows) -> np.ndarray:
        """Predicted one-hot responses, one row per query."""
        return self.transform(rows) @ self.y_loadings.T + self.y_mean


def pls_fit(train: LabeledDataset, variance_target: float = 0.95,
            max_components: int | None = None,
            variance_block: str = "x") -> PlsModel:
    """Fit PLS2 on mean-centered X against centered one-hot labels.

    Parameters
    ----------
    variance_target : float
        Cumulative explained-variance fraction at which extraction stops.
    max_components : int, optional
        Hard cap; defaults to min(n_samples - 1, n_features).
    variance_block : str
        "x" measures explained variance on the spectra block (default),
        "y" on the indicator block.
    """
    if variance_block not in ("x", "y"):
        raise ValueError("variance_block must be 'x' or 'y'")
    if not 0.0 < variance_target <= 1.0:
        raise ValueError("variance_target must lie in (0, 1]")
    n, p = train.rows.shape
    if n < 2:
        raise ValueError("PLS needs at least two samples")
    cap = min(n - 1, p)
    if max_components is not None:
        if max_components < 1:
            raise ValueError("max_components must be >= 1")
        cap = min(cap, max_components)

    x = train.rows.copy()
    y = np.zeros((n, train.n_classes))
    y[np.arange(n), train.labels] = 1.0
    x_mean = x.mean(axis=0)
    y_mean = y.mean(axis=0)
    x -= x_mean
    y -= y_mean

    ss_x_total = float(np.sum(x * x))
    ss_y_total = float(np.sum(y * y))
    if ss_x_total <= 0.0:
        raise ValueError("X block has zero variance; nothing to fit")

    ws, ps, qs, explained_x, explained_y = [], [], [], [], []
    for _ in range(cap):
        got = _extract_component(x, y)
        if got is None:
            break
        w, t, p_load, q_load = got
        tt = float(t @ t)
        x -= np.outer(t, p_load)
        y -= np.outer(t, q_load)
        ws.append(w)
        ps.append(p_load)
        qs.append(q_load)
        explained_x.append(tt * float(p_load @ p_load) / ss_x_total)
        explained_y.append(tt * float(q_load @ q_load) / ss_y_total
                           if ss_y_total > 0 else 0.0)
        cum = sum(explained_x) if variance_block == "x" else sum(explained_y)
        if cum >= variance_target:
            break

    if not ws:
        raise ValueError("no PLS component could be extracted")
    weights = np.column_stack(ws)
    x_loadings = np.column_stack(ps)
    y_loadings = np.column_stack(qs)
    rotation = weights @ np.linalg.inv(x_loadings.T @ weights)
    return PlsModel(x_mean, y_mean, weights, x_loadings, y_loadings, rotation,
                    np.asarray(explained_x), train.class_names)


def _extract_component(x, y):
    """One NIPALS round on the deflated blocks; None when nothing is left."""
    ss_y_cols = np.einsum("ij,ij->j", y, y)
    if np.sum(x * x) < 1e-300 or ss_y_cols.max() < 1e-300:
        return None
    u = y[:, int(np.argmax(ss_y_cols))]
    t_old = None
    for _ in range(NIPALS_MAX_ITER):
        w = x.T @ u / (u @ u)
        norm = np.linalg.norm(w)
        if norm < 1e-300:
            return None
        w /= norm
        t = x @ w
        tt = float(t @ t)
        if tt < 1e-300:
            return None
        q = y.T @ t / tt
        u = y @ q / (q @ q)
        if t_old is not None:
            if np.linalg.norm(t - t_old) <= NIPALS_TOL * max(1.0, np.sqrt(tt)):
                break
        t_old = t
    p_load = x.T @ t / tt
    return w, t, p_load, q


def pls_predict(model: PlsModel, rows) -> tuple[np.ndarray, np.ndarray]:
    """Class ids (argmax of the regressed responses; ties to the lowest id)
    and the response vectors themselves."""
    responses = model.responses(rows)
    return responses.argmax(axis=1), responses
