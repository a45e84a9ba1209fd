"""Labeled numeric matrices: CSV ingestion, class priors, stratified folds.

Values are stored column-accessible (Fortran order) because every pipeline
stage iterates per-variable over all samples.
"""

from __future__ import annotations

import csv
import math
from dataclasses import dataclass, field
from functools import cached_property
from pathlib import Path

import numpy as np

from .errors import DataError

# Shuffle generator used for fold assignment. Recorded in reports so fold
# splits are reproducible across builds and platforms.
FOLD_GENERATOR = "pcg64"


@dataclass(frozen=True)
class Dataset:
    """Immutable labeled numeric matrix.

    ``values`` is an (n, m) float64 array with one sample per row and one
    variable per column; ``labels`` carries the class of each row and
    ``classes`` is the sorted distinct label set.
    """

    variable_names: tuple[str, ...]
    values: np.ndarray
    labels: tuple[str, ...]
    classes: tuple[str, ...] = field(default=())

    def __post_init__(self):
        values = np.asfortranarray(np.asarray(self.values, dtype=np.float64))
        if values.ndim != 2:
            raise DataError(f"values must be 2-dimensional, got shape {values.shape}")
        n, m = values.shape
        if n < 1 or m < 1:
            raise DataError(f"dataset must have at least one sample and one variable, got {n}x{m}")
        if len(self.variable_names) != m:
            raise DataError(f"{len(self.variable_names)} variable names for {m} columns")
        if len(self.labels) != n:
            raise DataError(f"{len(self.labels)} labels for {n} samples")
        if not np.all(np.isfinite(values)):
            bad = np.argwhere(~np.isfinite(values))[0]
            raise DataError(f"non-finite value at sample {bad[0]}, variable {self.variable_names[bad[1]]!r}")
        names = tuple(self.variable_names)
        if len(set(names)) != len(names):
            raise DataError("duplicate variable names")
        values.setflags(write=False)
        object.__setattr__(self, "values", values)
        object.__setattr__(self, "variable_names", names)
        object.__setattr__(self, "labels", tuple(str(l) for l in self.labels))
        classes = tuple(sorted(set(self.labels)))
        if self.classes and tuple(self.classes) != classes:
            raise DataError("classes must be the sorted distinct label set")
        object.__setattr__(self, "classes", classes)

    @property
    def n(self) -> int:
        return self.values.shape[0]

    @property
    def m(self) -> int:
        return self.values.shape[1]

    @cached_property
    def variable_index(self) -> dict[str, int]:
        return {name: j for j, name in enumerate(self.variable_names)}

    @cached_property
    def class_rows(self) -> dict[str, np.ndarray]:
        """Row indices of each class, in class order."""
        labels = np.asarray(self.labels)
        return {c: np.flatnonzero(labels == c) for c in self.classes}

    def column(self, var: int | str) -> np.ndarray:
        j = self.variable_index[var] if isinstance(var, str) else var
        return self.values[:, j]

    def class_column(self, cls: str, var: int | str) -> np.ndarray:
        """Values of one variable restricted to one class."""
        return self.column(var)[self.class_rows[cls]]

    def subset(self, rows: np.ndarray) -> "Dataset":
        """New Dataset over a row subset (classes recomputed)."""
        rows = np.asarray(rows)
        labels = [self.labels[i] for i in rows]
        return Dataset(self.variable_names, self.values[rows], tuple(labels))


@dataclass(frozen=True)
class FoldPlan:
    """Stratified fold assignment: ``assignments[i]`` is sample i's fold."""

    k: int
    assignments: np.ndarray
    generator: str = FOLD_GENERATOR

    def test_rows(self, fold: int) -> np.ndarray:
        return np.flatnonzero(self.assignments == fold)

    def train_rows(self, fold: int) -> np.ndarray:
        return np.flatnonzero(self.assignments != fold)


def load_csv(path: str | Path, class_column: str | int) -> Dataset:
    """Load a headered, comma-separated file into a Dataset.

    The class column (selected by header name or 0-based index) is removed
    from the value matrix and kept as labels. Every other cell must parse as
    a finite real; the first offending cell is reported by row and column.
    """
    path = Path(path)
    if not path.exists():
        raise DataError(f"no such file: {path}")
    with path.open(newline="", encoding="utf-8") as fh:
        reader = csv.reader(fh)
        try:
            header = next(reader)
        except StopIteration:
            raise DataError(f"{path}: empty file") from None
        header = [h.strip() for h in header]
        if isinstance(class_column, int):
            if not -len(header) <= class_column < len(header):
                raise DataError(f"class column index {class_column} out of range for {len(header)} columns")
            class_idx = class_column % len(header)
        else:
            try:
                class_idx = header.index(class_column)
            except ValueError:
                raise DataError(f"class column {class_column!r} not found in header") from None
        names = tuple(h for i, h in enumerate(header) if i != class_idx)

        rows: list[list[float]] = []
        labels: list[str] = []
        for lineno, record in enumerate(reader, start=2):
            if not record:
                continue
            if len(record) != len(header):
                raise DataError(f"{path}: row {lineno} has {len(record)} fields, header has {len(header)}")
            labels.append(record[class_idx].strip())
            row = []
            for i, cell in enumerate(record):
                if i == class_idx:
                    continue
                try:
                    value = float(cell)
                except ValueError:
                    raise DataError(
                        f"{path}: row {lineno}, column {header[i]!r}: cannot parse {cell.strip()!r}"
                    ) from None
                if not math.isfinite(value):
                    raise DataError(f"{path}: row {lineno}, column {header[i]!r}: missing or non-finite value")
                row.append(value)
            rows.append(row)
    if not rows:
        raise DataError(f"{path}: no data rows")
    return Dataset(names, np.array(rows, dtype=np.float64), tuple(labels))


def save_csv(d: Dataset, path: str | Path, class_column: str = "class") -> None:
    """Write a Dataset back to CSV with 17-significant-digit reals.

    The emitted precision makes a load/save/load round trip bit-exact.
    """
    path = Path(path)
    with path.open("w", newline="", encoding="utf-8") as fh:
        writer = csv.writer(fh)
        writer.writerow(list(d.variable_names) + [class_column])
        for i in range(d.n):
            writer.writerow([format(v, ".17g") for v in d.values[i]] + [d.labels[i]])


def class_priors(d: Dataset) -> dict[str, float]:
    """Relative class frequencies; sum to 1 up to rounding."""
    n = d.n
    return {c: len(rows) / n for c, rows in d.class_rows.items()}


def stratified_kfold(d: Dataset, k: int, seed: int) -> FoldPlan:
    """Deterministic stratified fold assignment.

    Each class is shuffled with a PCG64 generator seeded by ``seed`` and
    dealt round-robin, so per-fold class counts differ by at most one.
    Classes with fewer than k samples simply miss some folds.
    """
    if k < 2:
        raise ValueError(f"k must be at least 2, got {k}")
    if k > d.n:
        raise ValueError(f"k={k} exceeds sample count n={d.n}")
    rng = np.random.Generator(np.random.PCG64(seed))
    assignments = np.empty(d.n, dtype=np.intp)
    offset = 0
    for c in d.classes:
        rows = d.class_rows[c]
        perm = rng.permutation(rows)
        for j, row in enumerate(perm):
            assignments[row] = (offset + j) % k
        # rotate the starting fold so leftover samples spread across folds
        offset = (offset + len(perm)) % k
    return FoldPlan(k=k, assignments=assignments)
