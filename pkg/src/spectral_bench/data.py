"""Spectra, labeled datasets, and CSV ingestion.

Dataset CSV contract: UTF-8, comma separated, header row holds the numeric
wavelength grid (in file order, strictly increasing) plus exactly one literal
``label`` column; each following row is one sample. Labels may be arbitrary
strings; they are mapped to dense integer ids in first-appearance order and
the original names are kept in ``class_names`` for auditability.
"""

from __future__ import annotations

import csv
from dataclasses import dataclass, field

import numpy as np

from .exceptions import DatasetError

# printed precision for CSV output; load(save(x)) == x to this many digits
_CSV_DIGITS = 9


def _as_float_vector(values, name: str) -> np.ndarray:
    arr = np.asarray(values, dtype=np.float64)
    if arr.ndim != 1:
        raise ValueError(f"{name} must be one-dimensional")
    if not np.all(np.isfinite(arr)):
        raise ValueError(f"{name} contains non-finite values")
    return arr


def _check_increasing(grid: np.ndarray):
    if grid.size >= 2 and not np.all(np.diff(grid) > 0):
        raise ValueError("wavelengths must be strictly increasing")


@dataclass(frozen=True)
class Spectrum:
    """A single spectrum: absorbance sampled over an ascending wavelength grid."""

    wavelengths: np.ndarray
    absorbances: np.ndarray
    unit: str = ""

    def __post_init__(self):
        wl = _as_float_vector(self.wavelengths, "wavelengths")
        ab = _as_float_vector(self.absorbances, "absorbances")
        if wl.shape != ab.shape:
            raise ValueError(
                f"wavelengths ({wl.size}) and absorbances ({ab.size}) differ in length"
            )
        _check_increasing(wl)
        object.__setattr__(self, "wavelengths", wl)
        object.__setattr__(self, "absorbances", ab)

    def __len__(self):
        return self.wavelengths.size


@dataclass(frozen=True)
class LabeledDataset:
    """Absorbance rows on a shared grid with dense integer class labels.

    ``labels[i]`` indexes ``class_names``; ids are assiged by the loader in
    first-appearance order. Instances are treated as immutable: operations
    that transform rows return a new dataset.
    """

    grid: np.ndarray
    rows: np.ndarray
    labels: np.ndarray
    class_names: tuple[str, ...]
    unit: str = ""

    def __post_init__(self):
        grid = _as_float_vector(self.grid, "grid")
        _check_increasing(grid)
        rows = np.asarray(self.rows, dtype=np.float64)
        if rows.ndim != 2:
            raise ValueError("rows must be a 2-D array (samples x wavelengths)")
        if rows.shape[1] != grid.size:
            raise ValueError(
                f"row length {rows.shape[1]} does not match grid length {grid.size}"
            )
        if not np.all(np.isfinite(rows)):
            raise ValueError("rows contain non-finite values")
        labels = np.asarray(self.labels, dtype=np.int64)
        if labels.ndim != 1 or labels.shape[0] != rows.shape[0]:
            raise ValueError("labels must be one per row")
        names = tuple(str(c) for c in self.class_names)
        if len(names) < 2:
            raise ValueError("a labeled dataset needs at least two classes")
        if rows.shape[0] == 0:
            raise ValueError("dataset has no rows")
        if labels.size and (labels.min() < 0 or labels.max() >= len(names)):
            raise ValueError("labels must lie in [0, number of classes)")
        object.__setattr__(self, "grid", grid)
        object.__setattr__(self, "rows", rows)
        object.__setattr__(self, "labels", labels)
        object.__setattr__(self, "class_names", names)

    @property
    def n_samples(self) -> int:
        return self.rows.shape[0]

    @property
    def n_features(self) -> int:
        return self.rows.shape[1]

    @property
    def n_classes(self) -> int:
        return len(self.class_names)

    def __len__(self):
        return self.n_samples

    def class_counts(self) -> np.ndarray:
        return np.bincount(self.labels, minlength=self.n_classes)

    def subset(self, indices) -> "LabeledDataset":
        """Dataset restricted to the given sample indices (class ids unchanged)."""
        idx = np.asarray(indices, dtype=np.int64)
        return LabeledDataset(self.grid, self.rows[idx], self.labels[idx],
                              self.class_names, self.unit)

    def with_rows(self, rows) -> "LabeledDataset":
        """Same grid/labels with transformed row values (e.g. after filtering)."""
        return LabeledDataset(self.grid, rows, self.labels, self.class_names, self.unit)

    def spectrum(self, i: int) -> Spectrum:
        return Spectrum(self.grid, self.rows[i], self.unit)


def load_csv(path) -> LabeledDataset:
    """Load a dataset CSV (see module docstring for the format contract).

    Raises
    ------
    DatasetError
        Missing/duplicated ``label`` column, non-increasing header wavelengths,
        ragged rows (named by row index), or non-numeric cells (named by row
        and column).
    """
    try:
        fh = open(path, "r", encoding="utf-8", newline="")
    except OSError as exc:
        raise DatasetError(f"cannot open dataset {path}: {exc}") from None
    with fh:
        reader = csv.reader(fh)
        try:
            header = next(reader)
        except StopIteration:
            raise DatasetError(f"{path}: file is empty") from None
        header = [h.strip() for h in header]
        label_cols = [i for i, h in enumerate(header) if h == "label"]
        if len(label_cols) != 1:
            raise DatasetError(
                f"{path}: expected exactly one 'label' column, found {len(label_cols)}"
            )
        label_col = label_cols[0]
        wl_cols = [i for i in range(len(header)) if i != label_col]
        if not wl_cols:
            raise DatasetError(f"{path}: no wavelength columns")
        grid = []
        for i in wl_cols:
            try:
                grid.append(float(header[i]))
            except ValueError:
                raise DatasetError(
                    f"{path}: header column {i} ({header[i]!r}) is not numeric"
                ) from None
        grid = np.asarray(grid)
        if grid.size >= 2 and not np.all(np.diff(grid) > 0):
            raise DatasetError(f"{path}: header wavelengths are not strictly increasing")

        rows, labels, class_names = [], [], []
        name_to_id: dict[str, int] = {}
        for row_idx, record in enumerate(reader):
            if not record:
                continue  # ignore blank lines
            if len(record) != len(header):
                raise DatasetError(
                    f"{path}: row {row_idx} has {len(record)} values, expected {len(header)}"
                )
            values = np.empty(len(wl_cols))
            for j, col in enumerate(wl_cols):
                try:
                    values[j] = float(record[col])
                except ValueError:
                    raise DatasetError(
                        f"{path}: row {row_idx}, column {col} "
                        f"({record[col]!r}) is not numeric"
                    ) from None
            name = record[label_col].strip()
            if name not in name_to_id:
                name_to_id[name] = len(class_names)
                class_names.append(name)
            rows.append(values)
            labels.append(name_to_id[name])

    if not rows:
        raise DatasetError(f"{path}: no data rows")
    try:
        return LabeledDataset(grid, np.vstack(rows), labels, class_names)
    except ValueError as exc:
        raise DatasetError(f"{path}: {exc}") from None


def save_csv(dataset: LabeledDataset, path):
    """Write a dataset CSV; numeric values printed to 9 significant digits."""
    fmt = f"%.{_CSV_DIGITS}g"
    with open(path, "w", encoding="utf-8", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow([fmt % w for w in dataset.grid] + ["label"])
        for row, label in zip(dataset.rows, dataset.labels):
            writer.writerow([fmt % v for v in row] + [dataset.class_names[label]])
