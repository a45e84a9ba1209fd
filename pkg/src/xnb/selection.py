"""Per-class minimal variable subsets from Hellinger distances.

A subset S discriminates class c with power
``1 - prod(1 - H(c, c' | v))`` over all other classes c' and all v in S.
For each class the selector walks its class pairs in sorted label order
and greedily adds the highest-H variable for the current pair until the
pair's contribution pushes the power past the threshold, reusing variables
selected for earlier pairs. If candidates run out first, every variable is
selected.
"""

from __future__ import annotations

import warnings
from dataclasses import dataclass, field

import numpy as np

from .hellinger import HellingerTable

DEFAULT_THETA = 0.999

TIE_BREAKS = ("lexicographic",)


@dataclass(frozen=True)
class SelectionConfig:
    theta: float = DEFAULT_THETA
    tie_break: str = "lexicographic"

    def __post_init__(self):
        if not 0.0 < self.theta < 1.0:
            raise ValueError(f"theta must lie in (0, 1), got {self.theta}")
        if self.tie_break not in TIE_BREAKS:
            raise ValueError(f"unknown tie break {self.tie_break!r}")


@dataclass(frozen=True)
class SelectionStep:
    """One greedy addition: which variable entered, for which class pair."""

    variable: str
    other_class: str
    h: float
    attained: float  # the pair's 1 - residual right after this addition
    order: int       # 0-based entry order within the class's subset


@dataclass(frozen=True)
class ClassFeatureMap:
    """Ordered selected variables per class, with the trace that chose them.

    ``pair_h`` retains each selected variable's Hellinger distance against
    every other class, for explanation output.
    """

    classes: tuple[str, ...]
    features: dict[str, tuple[str, ...]]
    steps: dict[str, tuple[SelectionStep, ...]] = field(default_factory=dict)
    pair_h: dict[str, dict[str, dict[str, float]]] = field(default_factory=dict)
    theta: float = DEFAULT_THETA

    def __post_init__(self):
        for c in self.classes:
            if c not in self.features:
                raise ValueError(f"no feature list for class {c!r}")
            feats = self.features[c]
            if len(set(feats)) != len(feats):
                raise ValueError(f"duplicate variables selected for class {c!r}")

    def count(self, cls: str) -> int:
        return len(self.features[cls])

    def union(self) -> tuple[str, ...]:
        """All selected variables, in first-appearance order across classes."""
        seen: dict[str, None] = {}
        for c in self.classes:
            for v in self.features[c]:
                seen.setdefault(v)
        return tuple(seen)


def discriminatory_power(subset, class_i: str, table: HellingerTable) -> float:
    """Power of ``subset`` to separate ``class_i`` from all other classes."""
    subset = tuple(subset)
    if not subset:
        raise ValueError("subset must be nonempty")
    if class_i not in table.classes:
        raise KeyError(f"unknown class {class_i!r}")
    residual = 1.0
    for other in table.classes:
        if other == class_i:
            continue
        for v in subset:
            residual *= 1.0 - table.value(v, class_i, other)
    return 1.0 - residual


def select_class_specific(table: HellingerTable, cfg: SelectionConfig | None = None) -> ClassFeatureMap:
    """Greedy per-class selection against the power threshold.

    Deterministic: class pairs are walked in sorted label order and ties in
    H are broken toward the lexicographically smaller variable name.
    """
    cfg = cfg or SelectionConfig()
    names = table.variable_names
    m = len(names)
    if len(table.classes) < 2:
        warnings.warn("single-class table: nothing to discriminate, empty selection")
        return ClassFeatureMap(
            classes=table.classes,
            features={c: () for c in table.classes},
            steps={c: () for c in table.classes},
            pair_h={c: {} for c in table.classes},
            theta=cfg.theta,
        )

    features: dict[str, tuple[str, ...]] = {}
    steps: dict[str, tuple[SelectionStep, ...]] = {}
    pair_h: dict[str, dict[str, dict[str, float]]] = {}
    for ci in table.classes:
        selected: list[str] = []
        selected_set: set[str] = set()
        trace: list[SelectionStep] = []
        for cj in table.classes:
            if cj == ci:
                continue
            h_pair = table.pair_column(ci, cj)
            # residual contribution of variables already in the subset
            residual = 1.0
            for v in selected:
                residual *= 1.0 - table.value(v, ci, cj)
            # ties in H resolve to the lexicographically smaller name
            order = sorted(range(m), key=lambda j: (-h_pair[j], names[j]))
            cursor = 0
            while 1.0 - residual <= cfg.theta and len(selected) < m:
                while names[order[cursor]] in selected_set:
                    cursor += 1
                j = order[cursor]
                selected.append(names[j])
                selected_set.add(names[j])
                residual *= 1.0 - h_pair[j]
                trace.append(
                    SelectionStep(
                        variable=names[j],
                        other_class=cj,
                        h=float(h_pair[j]),
                        attained=1.0 - residual,
                        order=len(selected) - 1,
                    )
                )
        features[ci] = tuple(selected)
        steps[ci] = tuple(trace)
        pair_h[ci] = {
            v: {cj: table.value(v, ci, cj) for cj in table.classes if cj != ci}
            for v in selected
        }
    return ClassFeatureMap(
        classes=table.classes, features=features, steps=steps, pair_h=pair_h, theta=cfg.theta
    )


@dataclass(frozen=True)
class ExplanationRow:
    class_label: str
    variable: str
    other_class: str
    h: float
    attained: float
    order: int


def explain_selection(fmap: ClassFeatureMap):
    """Flatten the greedy trace into explanation rows plus a membership matrix.

    Returns ``(rows, membership)`` where membership maps each class to a
    0/1 indicator over the union of selected variables.
    """
    rows = [
        ExplanationRow(c, s.variable, s.other_class, s.h, s.attained, s.order)
        for c in fmap.classes
        for s in fmap.steps.get(c, ())
    ]
    if not rows and all(not fmap.features[c] for c in fmap.classes):
        warnings.warn("empty selection: no class pairs to explain")
    union = fmap.union()
    membership = {
        c: {v: int(v in fmap.features[c]) for v in union} for c in fmap.classes
    }
    return rows, membership
