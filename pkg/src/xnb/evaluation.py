"""Stratified cross-validation harness comparing the three classifiers."""

from __future__ import annotations

import json
import sys
import warnings
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from .classifier import (
    FIT_STAGES,
    XnbConfig,
    fit_fnb,
    fit_gnb,
    fit_xnb,
    predict,
)
from .dataset import FOLD_GENERATOR, Dataset, stratified_kfold
from .errors import XnbError

METHODS = ("gnb", "fnb", "xnb")
DEFAULT_METHODS = ("gnb", "xnb")
REPORT_SCHEMA_VERSION = 1


def accuracy(predictions, truth) -> float:
    """Fraction of matching labels."""
    predictions = list(predictions)
    truth = list(truth)
    if len(predictions) != len(truth):
        raise ValueError(f"length mismatch: {len(predictions)} predictions vs {len(truth)} labels")
    if not truth:
        raise ValueError("empty label sequences")
    return sum(p == t for p, t in zip(predictions, truth)) / len(truth)


@dataclass(frozen=True)
class EvaluationReport:
    """Per-fold and mean accuracies, XNB selection sizes, stage timings."""

    methods: tuple[str, ...]
    k: int
    seed: int
    config: dict
    fold_accuracies: dict[str, tuple[float, ...]]
    mean_accuracy: dict[str, float]
    xnb_fold_class_counts: tuple[dict[str, int], ...] | None
    xnb_fold_mean_counts: tuple[float, ...] | None
    xnb_mean_class_counts: dict[str, float] | None
    xnb_mean_selected: float | None
    timings: dict[str, float] = field(default_factory=dict)
    fold_generator: str = FOLD_GENERATOR
    schema_version: int = REPORT_SCHEMA_VERSION

    def to_dict(self) -> dict:
        return {
            "schema_version": self.schema_version,
            "methods": list(self.methods),
            "k": self.k,
            "seed": self.seed,
            "fold_generator": self.fold_generator,
            "config": dict(self.config),
            "fold_accuracies": {m: list(a) for m, a in self.fold_accuracies.items()},
            "mean_accuracy": dict(self.mean_accuracy),
            "xnb_fold_class_counts": (
                [dict(c) for c in self.xnb_fold_class_counts]
                if self.xnb_fold_class_counts is not None
                else None
            ),
            "xnb_fold_mean_counts": (
                list(self.xnb_fold_mean_counts) if self.xnb_fold_mean_counts is not None else None
            ),
            "xnb_mean_class_counts": (
                dict(self.xnb_mean_class_counts) if self.xnb_mean_class_counts is not None else None
            ),
            "xnb_mean_selected": self.xnb_mean_selected,
            "timings": dict(self.timings),
        }

    @classmethod
    def from_dict(cls, payload: dict) -> "EvaluationReport":
        return cls(
            methods=tuple(payload["methods"]),
            k=int(payload["k"]),
            seed=int(payload["seed"]),
            config=dict(payload["config"]),
            fold_accuracies={m: tuple(a) for m, a in payload["fold_accuracies"].items()},
            mean_accuracy=dict(payload["mean_accuracy"]),
            xnb_fold_class_counts=(
                tuple(dict(c) for c in payload["xnb_fold_class_counts"])
                if payload["xnb_fold_class_counts"] is not None
                else None
            ),
            xnb_fold_mean_counts=(
                tuple(payload["xnb_fold_mean_counts"])
                if payload["xnb_fold_mean_counts"] is not None
                else None
            ),
            xnb_mean_class_counts=(
                dict(payload["xnb_mean_class_counts"])
                if payload["xnb_mean_class_counts"] is not None
                else None
            ),
            xnb_mean_selected=payload["xnb_mean_selected"],
            timings=dict(payload["timings"]),
            fold_generator=payload["fold_generator"],
            schema_version=int(payload["schema_version"]),
        )


def _fit_for(method: str, train: Dataset, config: XnbConfig, jobs: int):
    if method == "gnb":
        return fit_gnb(train)
    if method == "fnb":
        return fit_fnb(train, config)
    return fit_xnb(train, config, jobs=jobs)


def evaluate_cv(
    d: Dataset,
    methods=DEFAULT_METHODS,
    k: int = 10,
    seed: int = 0,
    config: XnbConfig | None = None,
    jobs: int = 1,
) -> EvaluationReport:
    """Stratified k-fold comparison; deterministic for a given seed.

    Per fold, each method is fit on the training split and scored on the
    held-out fold. XNB folds additionally record how many variables each
    class selected. Stage timings aggregate every KDE-based fit across
    folds and vary run to run; everything else is reproducible.
    """
    config = config or XnbConfig()
    methods = tuple(methods)
    unknown = set(methods) - set(METHODS)
    if unknown:
        raise ValueError(f"unknown methods: {', '.join(sorted(unknown))}")
    smallest = min(len(rows) for rows in d.class_rows.values())
    if k > smallest:
        warnings.warn(
            f"k={k} exceeds the smallest class size {smallest}; "
            "some folds will miss that class"
        )
    plan = stratified_kfold(d, k, seed)

    fold_acc: dict[str, list[float]] = {m: [] for m in methods}
    fold_counts: list[dict[str, int]] = []
    fold_mean_counts: list[float] = []
    timings = {stage: 0.0 for stage in FIT_STAGES}

    for fold in range(k):
        train = d.subset(plan.train_rows(fold))
        test_rows = plan.test_rows(fold)
        truth = [d.labels[i] for i in test_rows]
        for method in methods:
            try:
                model = _fit_for(method, train, config, jobs)
            except XnbError as exc:
                raise type(exc)(f"fold {fold}: {exc}") from exc
            labels = [predict(model, d.values[i]).label for i in test_rows]
            fold_acc[method].append(accuracy(labels, truth))
            for stage, t in (getattr(model, "timings", None) or {}).items():
                timings[stage] += t
            if method == "xnb":
                counts = {c: model.features.count(c) for c in model.classes}
                fold_counts.append(counts)
                fold_mean_counts.append(float(np.mean(list(counts.values()))))

    has_xnb = "xnb" in methods
    mean_class_counts = None
    if has_xnb:
        # tiny classes can drop out of a fold's training split entirely
        mean_class_counts = {
            c: float(np.mean([counts[c] for counts in fold_counts if c in counts]))
            for c in d.classes
            if any(c in counts for counts in fold_counts)
        }
    return EvaluationReport(
        methods=methods,
        k=k,
        seed=seed,
        config={
            "kernel": config.kernel,
            "bandwidth_rule": config.bandwidth_rule,
            "mu": config.mu,
            "theta": config.theta,
            "floor": config.floor,
        },
        fold_accuracies={m: tuple(a) for m, a in fold_acc.items()},
        mean_accuracy={m: float(np.mean(a)) for m, a in fold_acc.items()},
        xnb_fold_class_counts=tuple(fold_counts) if has_xnb else None,
        xnb_fold_mean_counts=tuple(fold_mean_counts) if has_xnb else None,
        xnb_mean_class_counts=mean_class_counts,
        xnb_mean_selected=float(np.mean(fold_mean_counts)) if has_xnb else None,
        timings=timings,
    )


def _tsv_lines(report: EvaluationReport, m_variables: int | None = None) -> list[str]:
    lines = ["method\tmean_accuracy\tmean_selected"]
    for method in report.methods:
        if method == "xnb":
            selected = f"{report.xnb_mean_selected:.6f}"
        elif m_variables is not None:
            selected = str(m_variables)
        else:
            selected = ""
        lines.append(f"{method}\t{report.mean_accuracy[method]:.6f}\t{selected}")
    return lines


def emit_report(
    report: EvaluationReport,
    format: str = "json",
    path: str | Path | None = None,
    m_variables: int | None = None,
) -> None:
    """Write a report as JSON (full detail) or TSV (one row per method)."""
    if format == "json":
        text = json.dumps(report.to_dict(), indent=1) + "\n"
    elif format == "tsv":
        text = "\n".join(_tsv_lines(report, m_variables)) + "\n"
    else:
        raise ValueError(f"unknown report format {format!r}")
    if path is None:
        sys.stdout.write(text)
    else:
        Path(path).write_text(text, encoding="utf-8")
