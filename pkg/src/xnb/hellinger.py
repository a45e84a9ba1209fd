"""Hellinger distances between class-conditional densities.

Each variable's per-class KDE is evaluated on one grid shared by all
classes (distances are only meaningful over a common event space), the
grid densities are sum-normalized into discrete distributions, and the
distance ``sqrt(sum((sqrt(p) - sqrt(q))^2)) / sqrt(2)`` is tabulated for
every unordered class pair.

Table construction is the pipeline's hot loop at genomic widths, so the
usual case (one kernel, per-class sample counts consistent across
variables) runs blockwise over packed sample matrices; with ``jobs`` > 1
the blocks are spread over worker processes as raw arrays. Banks that
break those assumptions fall back to a per-variable loop over the model
objects themselves.
"""

from __future__ import annotations

import warnings
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass
from functools import cached_property
from itertools import combinations

import numpy as np

from .dataset import Dataset
from .kde import DEFAULT_MU, KdeModel, kde_on_grid, kernel_eval, make_grid

_INV_SQRT2 = 1.0 / np.sqrt(2.0)


def normalize_to_distribution(densities) -> np.ndarray:
    """Scale a non-negative vector to sum to 1.

    A zero-sum vector (possible only under pathological fallback bandwidths)
    becomes the uniform distribution, with a warning.
    """
    densities = np.asarray(densities, dtype=np.float64)
    if densities.size == 0:
        raise ValueError("densities must be nonempty")
    if np.any(densities < 0):
        raise ValueError("densities must be non-negative")
    total = densities.sum()
    if total <= 0.0:
        warnings.warn("zero-sum density vector normalized to uniform", stacklevel=2)
        return np.full(densities.size, 1.0 / densities.size)
    return densities / total


def hellinger(p, q) -> float:
    """Hellinger distance between two equal-length discrete distributions."""
    p = np.asarray(p, dtype=np.float64)
    q = np.asarray(q, dtype=np.float64)
    if p.shape != q.shape:
        raise ValueError(f"length mismatch: {p.shape} vs {q.shape}")
    d = _INV_SQRT2 * np.sqrt(np.sum((np.sqrt(p) - np.sqrt(q)) ** 2))
    return min(float(d), 1.0)


@dataclass(frozen=True)
class HellingerTable:
    """H(class_i, class_j | variable) for all variables and class pairs.

    ``distances`` is (m, k(k-1)/2) with pairs in ``combinations(classes, 2)``
    order; lookups are symmetric in the two classes.
    """

    variable_names: tuple[str, ...]
    classes: tuple[str, ...]
    distances: np.ndarray

    def __post_init__(self):
        distances = np.asarray(self.distances, dtype=np.float64)
        expected = (len(self.variable_names), len(self.class_pairs))
        if distances.shape != expected:
            raise ValueError(f"distances shape {distances.shape}, expected {expected}")
        distances.setflags(write=False)
        object.__setattr__(self, "distances", distances)
        object.__setattr__(self, "variable_names", tuple(self.variable_names))
        object.__setattr__(self, "classes", tuple(self.classes))

    @cached_property
    def class_pairs(self) -> tuple[tuple[str, str], ...]:
        return tuple(combinations(self.classes, 2))

    @cached_property
    def _variable_index(self) -> dict[str, int]:
        return {name: i for i, name in enumerate(self.variable_names)}

    @cached_property
    def _pair_index(self) -> dict[tuple[str, str], int]:
        return {pair: i for i, pair in enumerate(self.class_pairs)}

    def value(self, variable: str, class_i: str, class_j: str) -> float:
        """H for one variable and one (unordered) class pair."""
        try:
            row = self._variable_index[variable]
        except KeyError:
            raise KeyError(f"variable {variable!r} not in table") from None
        pair = (class_i, class_j) if class_i < class_j else (class_j, class_i)
        try:
            col = self._pair_index[pair]
        except KeyError:
            raise KeyError(f"no class pair {class_i!r}/{class_j!r} in table") from None
        return float(self.distances[row, col])

    def pair_column(self, class_i: str, class_j: str) -> np.ndarray:
        """H of every variable for one class pair."""
        pair = (class_i, class_j) if class_i < class_j else (class_j, class_i)
        return self.distances[:, self._pair_index[pair]]

    def rows(self):
        """Iterate (variable, class_i, class_j, h) over the whole table."""
        for v, row in zip(self.variable_names, self.distances):
            for (ci, cj), h in zip(self.class_pairs, row):
                yield v, ci, cj, float(h)


def _variable_distances(models, mu):
    """Per-variable reference path: one grid, one KDE evaluation per class.

    ``models`` is a list of per-variable lists of KdeModel, one per class.
    """
    n_classes = len(models[0]) if models else 0
    pair_idx = list(combinations(range(n_classes), 2))
    out = np.empty((len(models), len(pair_idx)))
    for j, per_class in enumerate(models):
        pooled = np.concatenate([model.samples for model in per_class])
        grid = make_grid(pooled, mu)
        dists = [normalize_to_distribution(kde_on_grid(model, grid)) for model in per_class]
        for col, (a, b) in enumerate(pair_idx):
            out[j, col] = hellinger(dists[a], dists[b])
    return out


def _block_distances(stacks, h_rows, kernel, mu, block=256):
    """Blockwise path over packed per-class sample matrices.

    ``stacks[c]`` is (n_c, w): one column of samples per variable;
    ``h_rows[c]`` is (w,). Same grids and reductions as the per-variable
    path, batched; agreement is within one ulp (reduction striding).
    """
    k = len(stacks)
    w = h_rows[0].size
    pair_idx = list(combinations(range(k), 2))
    out = np.empty((w, len(pair_idx)))
    zero_sum_columns = 0
    for lo in range(0, w, block):
        hi = min(lo + block, w)
        sub = [s[:, lo:hi] for s in stacks]
        col_lo = np.min([s.min(axis=0) for s in sub], axis=0)
        col_hi = np.max([s.max(axis=0) for s in sub], axis=0)
        flat = col_lo == col_hi
        col_lo = np.where(flat, col_lo - 1.0, col_lo)
        col_hi = np.where(flat, col_hi + 1.0, col_hi)
        grids = np.linspace(col_lo, col_hi, mu)  # (mu, width)

        dists = []
        for c in range(k):
            h = h_rows[c][lo:hi]
            u = (grids[:, None, :] - sub[c][None, :, :]) / h[None, None, :]
            dens = kernel_eval(kernel, u).sum(axis=1) / (sub[c].shape[0] * h)
            totals = dens.sum(axis=0)
            zero = totals <= 0.0
            if zero.any():
                zero_sum_columns += int(zero.sum())
                dens[:, zero] = 1.0
                totals = np.where(zero, float(mu), totals)
            dists.append(dens / totals)
        for col, (a, b) in enumerate(pair_idx):
            d = _INV_SQRT2 * np.sqrt(((np.sqrt(dists[a]) - np.sqrt(dists[b])) ** 2).sum(axis=0))
            out[lo:hi, col] = np.minimum(d, 1.0)
    if zero_sum_columns:
        warnings.warn(
            f"{zero_sum_columns} zero-sum density vectors normalized to uniform",
            stacklevel=2,
        )
    return out


def _pack_bank(d: Dataset, kde_bank):
    """Stack the bank into per-class matrices, or None if not stackable."""
    kernels = {model.kernel for model in kde_bank.values()}
    if len(kernels) != 1:
        return None
    stacks = []
    h_rows = []
    for c in d.classes:
        per_var = [kde_bank[(c, v)] for v in d.variable_names]
        lengths = {model.n for model in per_var}
        if len(lengths) != 1:
            return None
        stacks.append(np.column_stack([model.samples for model in per_var]))
        h_rows.append(np.array([model.h for model in per_var]))
    return stacks, h_rows, next(iter(kernels))


def hellinger_table(
    d: Dataset,
    kde_bank: dict[tuple[str, str], KdeModel],
    mu: int = DEFAULT_MU,
    jobs: int = 1,
) -> HellingerTable:
    """Tabulate H for every variable and unordered class pair.

    ``kde_bank`` must hold a fitted model for every (class, variable) pair.
    With ``jobs`` > 1 the variable blocks are spread over processes;
    results are identical to the sequential path.
    """
    missing = [
        (c, v) for c in d.classes for v in d.variable_names if (c, v) not in kde_bank
    ]
    if missing:
        c, v = missing[0]
        raise ValueError(
            f"kde bank incomplete: no model for class {c!r}, variable {v!r} (+{len(missing) - 1} more)"
        )

    packed = _pack_bank(d, kde_bank)
    if packed is None:
        models = [[kde_bank[(c, v)] for c in d.classes] for v in d.variable_names]
        distances = _variable_distances(models, mu)
        return HellingerTable(d.variable_names, d.classes, distances)

    stacks, h_rows, kernel = packed
    if jobs <= 1 or d.m < 2 * jobs:
        distances = _block_distances(stacks, h_rows, kernel, mu)
    else:
        bounds = np.linspace(0, d.m, jobs + 1).astype(int)
        chunks = [(bounds[i], bounds[i + 1]) for i in range(jobs) if bounds[i] < bounds[i + 1]]
        with ProcessPoolExecutor(max_workers=len(chunks)) as pool:
            futures = [
                pool.submit(
                    _block_distances,
                    [np.ascontiguousarray(s[:, lo:hi]) for s in stacks],
                    [h[lo:hi] for h in h_rows],
                    kernel,
                    mu,
                )
                for lo, hi in chunks
            ]
            distances = np.vstack([f.result() for f in futures])
    return HellingerTable(d.variable_names, d.classes, distances)
