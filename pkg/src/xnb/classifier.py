"""Class-specific KDE Bayes classifier plus Gaussian and full-KDE baselines.

Fitting runs five stages: per-(class, variable) bandwidths, the full KDE
bank, the Hellinger table, the per-class variable selection, and a final
rebuild of the KDE bank restricted to the selected variables (bandwidths
are unchanged; the rebuild keeps the model self-contained for
serialization). Prediction scores each class with its own variable subset:
log prior plus the sum of floored log densities over that subset only.
"""

from __future__ import annotations

import json
import math
import time
import warnings
from dataclasses import dataclass, field
from functools import cached_property
from pathlib import Path

import numpy as np

from .dataset import Dataset, class_priors
from .errors import DataError, ModelFormatError
from .hellinger import hellinger_table
from .kde import (
    DEFAULT_KERNEL,
    DEFAULT_MU,
    DEFAULT_RULE,
    KdeModel,
    canonical_kernel,
    canonical_rule,
    kde_density_at,
    scott_bandwidth,
    silverman_adaptive_bandwidth,
    silverman_bandwidth,
)
from .selection import DEFAULT_THETA, ClassFeatureMap, SelectionConfig, select_class_specific

MODEL_SCHEMA_VERSION = 1

DEFAULT_FLOOR = 1e-12

FIT_STAGES = ("bandwidth", "kde", "hellinger", "select", "build")


@dataclass(frozen=True)
class XnbConfig:
    """Pipeline settings carried by fitted models and model files."""

    kernel: str = DEFAULT_KERNEL
    bandwidth_rule: str = DEFAULT_RULE
    mu: int = DEFAULT_MU
    theta: float = DEFAULT_THETA
    floor: float = DEFAULT_FLOOR

    def __post_init__(self):
        object.__setattr__(self, "kernel", canonical_kernel(self.kernel))
        object.__setattr__(self, "bandwidth_rule", canonical_rule(self.bandwidth_rule))
        if self.mu < 2:
            raise ValueError(f"mu must be at least 2, got {self.mu}")
        if not 0.0 < self.theta < 1.0:
            raise ValueError(f"theta must lie in (0, 1), got {self.theta}")
        if not 0.0 < self.floor < 1.0:
            raise ValueError(f"probability floor must lie in (0, 1), got {self.floor}")


@dataclass(frozen=True)
class Prediction:
    label: str
    log_scores: dict[str, float]
    used_features: dict[str, tuple[str, ...]]


@dataclass(frozen=True)
class XnbModel:
    """Class priors, per-class variable subsets, and their KDE models."""

    classes: tuple[str, ...]
    priors: dict[str, float]
    features: ClassFeatureMap
    kde_bank: dict[tuple[str, str], KdeModel]
    config: XnbConfig
    variable_names: tuple[str, ...]
    method: str = "xnb"
    timings: dict[str, float] | None = field(default=None, compare=False)

    def __post_init__(self):
        expected = {(c, v) for c in self.classes for v in self.features.features[c]}
        if expected != set(self.kde_bank):
            raise ValueError("kde bank does not match the selected features")
        if abs(sum(self.priors.values()) - 1.0) > 1e-9:
            raise ValueError("priors must sum to 1")

    @property
    def m(self) -> int:
        return len(self.variable_names)

    @cached_property
    def variable_index(self) -> dict[str, int]:
        return {v: j for j, v in enumerate(self.variable_names)}


@dataclass(frozen=True)
class GnbModel:
    """Gaussian naive Bayes: per-(class, variable) moments over all variables."""

    classes: tuple[str, ...]
    priors: dict[str, float]
    variable_names: tuple[str, ...]
    means: np.ndarray
    variances: np.ndarray
    smoothing: float
    method: str = "gnb"

    def __post_init__(self):
        means = np.asarray(self.means, dtype=np.float64)
        variances = np.asarray(self.variances, dtype=np.float64)
        shape = (len(self.classes), len(self.variable_names))
        if means.shape != shape or variances.shape != shape:
            raise ValueError(f"moment arrays must have shape {shape}")
        if np.any(variances <= 0):
            raise ValueError("variances must be strictly positive after smoothing")
        means.setflags(write=False)
        variances.setflags(write=False)
        object.__setattr__(self, "means", means)
        object.__setattr__(self, "variances", variances)

    @property
    def m(self) -> int:
        return len(self.variable_names)


def _check_trainable(d: Dataset) -> None:
    if len(d.classes) < 2:
        raise DataError(f"classification needs at least 2 classes, got {len(d.classes)}")
    singletons = [c for c in d.classes if len(d.class_rows[c]) < 2]
    if singletons:
        warnings.warn(
            f"classes with a single sample ({', '.join(singletons)}): "
            "their densities use degenerate fallback bandwidths"
        )


def _bandwidth_matrix(d: Dataset, rule: str) -> np.ndarray:
    """(k, m) bandwidths, one row per class, with degenerate fallbacks.

    Vectorized counterpart of ``kde.bandwidth`` applied per (class, variable).
    """
    global_range = np.ptp(d.values, axis=0)
    fallback = np.maximum(1e-3 * global_range, 1e-9)
    rows = []
    for c in d.classes:
        sub = d.values[d.class_rows[c]]
        n_c = sub.shape[0]
        sigma = np.std(sub, axis=0, ddof=1) if n_c > 1 else np.zeros(d.m)
        if rule == "scott":
            h = scott_bandwidth(sigma, n_c)
        elif rule == "silverman":
            h = silverman_bandwidth(sigma, n_c)
        else:
            q1, q3 = np.percentile(sub, [25.0, 75.0], axis=0)
            h = silverman_adaptive_bandwidth(sigma, q3 - q1, n_c)
        bad = ~np.isfinite(h) | (h <= 0.0)
        rows.append(np.where(bad, fallback, h))
    return np.array(rows)


def _full_bank(d: Dataset, h_matrix: np.ndarray, kernel: str) -> dict[tuple[str, str], KdeModel]:
    bank = {}
    for i, c in enumerate(d.classes):
        sub = d.values[d.class_rows[c]]
        for j, v in enumerate(d.variable_names):
            bank[(c, v)] = KdeModel(sub[:, j], float(h_matrix[i, j]), kernel)
    return bank


def _selected_bank(
    d: Dataset, features: ClassFeatureMap, h_matrix: np.ndarray, kernel: str
) -> dict[tuple[str, str], KdeModel]:
    """Rebuild KDE models for the selected (class, variable) pairs only."""
    bank = {}
    for i, c in enumerate(d.classes):
        rows = d.class_rows[c]
        for v in features.features[c]:
            j = d.variable_index[v]
            bank[(c, v)] = KdeModel(d.values[rows, j], float(h_matrix[i, j]), kernel)
    return bank


def fit_xnb(d: Dataset, config: XnbConfig | None = None, jobs: int = 1) -> XnbModel:
    """Fit the class-specific KDE Bayes model."""
    config = config or XnbConfig()
    _check_trainable(d)
    timings: dict[str, float] = {}

    t0 = time.perf_counter()
    h_matrix = _bandwidth_matrix(d, config.bandwidth_rule)
    timings["bandwidth"] = time.perf_counter() - t0

    t0 = time.perf_counter()
    bank = _full_bank(d, h_matrix, config.kernel)
    timings["kde"] = time.perf_counter() - t0

    t0 = time.perf_counter()
    table = hellinger_table(d, bank, mu=config.mu, jobs=jobs)
    timings["hellinger"] = time.perf_counter() - t0

    t0 = time.perf_counter()
    features = select_class_specific(table, SelectionConfig(theta=config.theta))
    timings["select"] = time.perf_counter() - t0

    t0 = time.perf_counter()
    selected = _selected_bank(d, features, h_matrix, config.kernel)
    timings["build"] = time.perf_counter() - t0

    return XnbModel(
        classes=d.classes,
        priors=class_priors(d),
        features=features,
        kde_bank=selected,
        config=config,
        variable_names=d.variable_names,
        method="xnb",
        timings=timings,
    )


def fit_fnb(d: Dataset, config: XnbConfig | None = None) -> XnbModel:
    """KDE Bayes with selection disabled: every class keeps all variables."""
    config = config or XnbConfig()
    _check_trainable(d)
    timings: dict[str, float] = {}

    t0 = time.perf_counter()
    h_matrix = _bandwidth_matrix(d, config.bandwidth_rule)
    timings["bandwidth"] = time.perf_counter() - t0

    features = ClassFeatureMap(
        classes=d.classes,
        features={c: d.variable_names for c in d.classes},
        theta=config.theta,
    )

    t0 = time.perf_counter()
    bank = _full_bank(d, h_matrix, config.kernel)
    timings["kde"] = timings["build"] = time.perf_counter() - t0
    timings["hellinger"] = timings["select"] = 0.0

    return XnbModel(
        classes=d.classes,
        priors=class_priors(d),
        features=features,
        kde_bank=bank,
        config=config,
        variable_names=d.variable_names,
        method="fnb",
        timings=timings,
    )


def fit_gnb(d: Dataset) -> GnbModel:
    """Gaussian naive Bayes baseline over all variables.

    Class variances use the n-1 denominator and are smoothed by 1e-9 times
    the largest global per-variable variance (an absolute floor keeps them
    positive when every variable is constant).
    """
    if len(d.classes) < 2:
        raise DataError(f"classification needs at least 2 classes, got {len(d.classes)}")
    k, m = len(d.classes), d.m
    means = np.empty((k, m))
    variances = np.empty((k, m))
    for i, c in enumerate(d.classes):
        sub = d.values[d.class_rows[c]]
        means[i] = sub.mean(axis=0)
        variances[i] = np.var(sub, axis=0, ddof=1) if sub.shape[0] > 1 else 0.0
    global_var = np.var(d.values, axis=0, ddof=1) if d.n > 1 else np.zeros(m)
    max_var = float(np.max(global_var)) if m else 0.0
    smoothing = 1e-9 * max_var if max_var > 0 else 1e-9
    return GnbModel(
        classes=d.classes,
        priors=class_priors(d),
        variable_names=d.variable_names,
        means=means,
        variances=variances + smoothing,
        smoothing=smoothing,
    )


def _pick_label(log_scores: dict[str, float], priors: dict[str, float]) -> str:
    """Argmax label; exact ties go to the larger prior, then the smaller name."""
    best = max(log_scores.values())
    candidates = [c for c, s in log_scores.items() if s == best]
    if len(candidates) == 1:
        return candidates[0]
    return min(candidates, key=lambda c: (-priors[c], c))


def _check_sample(sample, m: int) -> np.ndarray:
    sample = np.asarray(sample, dtype=np.float64)
    if sample.shape != (m,):
        raise ValueError(f"sample must be a vector of length {m}, got shape {sample.shape}")
    if not np.all(np.isfinite(sample)):
        raise ValueError("sample entries must be finite")
    return sample


def predict_xnb(model: XnbModel, sample) -> Prediction:
    """Score each class over its own variable subset and take the argmax.

    Densities below the configured floor are clamped so that log scores
    stay finite for samples outside every training range.
    """
    sample = _check_sample(sample, model.m)
    index = model.variable_index
    floor = model.config.floor
    log_scores = {}
    for c in model.classes:
        score = math.log(model.priors[c])
        for v in model.features.features[c]:
            density = kde_density_at(model.kde_bank[(c, v)], sample[index[v]])
            score += math.log(max(density, floor))
        log_scores[c] = score
    label = _pick_label(log_scores, model.priors)
    return Prediction(label=label, log_scores=log_scores, used_features=dict(model.features.features))


def predict_gnb(model: GnbModel, sample) -> Prediction:
    """Gaussian log-likelihood scoring over all variables."""
    sample = _check_sample(sample, model.m)
    log_density = -0.5 * (
        np.log(2.0 * np.pi * model.variances) + (sample - model.means) ** 2 / model.variances
    )
    log_scores = {
        c: float(math.log(model.priors[c]) + log_density[i].sum())
        for i, c in enumerate(model.classes)
    }
    label = _pick_label(log_scores, model.priors)
    used = {c: model.variable_names for c in model.classes}
    return Prediction(label=label, log_scores=log_scores, used_features=used)


def predict(model: XnbModel | GnbModel, sample) -> Prediction:
    if isinstance(model, GnbModel):
        return predict_gnb(model, sample)
    return predict_xnb(model, sample)


def _model_payload(model: XnbModel | GnbModel) -> dict:
    payload = {
        "version": MODEL_SCHEMA_VERSION,
        "method": model.method,
        "classes": list(model.classes),
        "priors": dict(model.priors),
        "variables": list(model.variable_names),
    }
    if isinstance(model, GnbModel):
        payload["gnb"] = {
            "means": model.means.tolist(),
            "variances": model.variances.tolist(),
            "smoothing": model.smoothing,
        }
        return payload
    payload["config"] = {
        "kernel": model.config.kernel,
        "bandwidth_rule": model.config.bandwidth_rule,
        "mu": model.config.mu,
        "theta": model.config.theta,
        "floor": model.config.floor,
        "pair_order": "sorted-labels",
        "tie_break": "lexicographic",
    }
    payload["features"] = {c: list(model.features.features[c]) for c in model.classes}
    payload["kde"] = {
        c: {
            v: {
                "samples": model.kde_bank[(c, v)].samples.tolist(),
                "h": model.kde_bank[(c, v)].h,
                "kernel": model.kde_bank[(c, v)].kernel,
            }
            for v in model.features.features[c]
        }
        for c in model.classes
    }
    return payload


def save_model(model: XnbModel | GnbModel, path: str | Path) -> None:
    """Write a model as versioned JSON (floats round-trip bit-exactly)."""
    path = Path(path)
    with path.open("w", encoding="utf-8") as fh:
        json.dump(_model_payload(model), fh, indent=1)
        fh.write("\n")


def load_model(path: str | Path) -> XnbModel | GnbModel:
    """Read a model file; predictions round-trip bit-exactly."""
    path = Path(path)
    if not path.exists():
        raise ModelFormatError(f"no such model file: {path}")
    try:
        with path.open(encoding="utf-8") as fh:
            payload = json.load(fh)
    except (json.JSONDecodeError, UnicodeDecodeError) as exc:
        raise ModelFormatError(f"{path}: not a valid model file ({exc})") from exc
    version = payload.get("version")
    if version != MODEL_SCHEMA_VERSION:
        raise ModelFormatError(f"{path}: schema version {version!r}, expected {MODEL_SCHEMA_VERSION}")
    try:
        method = payload["method"]
        classes = tuple(payload["classes"])
        priors = {c: float(p) for c, p in payload["priors"].items()}
        variables = tuple(payload["variables"])
        if method == "gnb":
            gnb = payload["gnb"]
            return GnbModel(
                classes=classes,
                priors=priors,
                variable_names=variables,
                means=np.array(gnb["means"], dtype=np.float64),
                variances=np.array(gnb["variances"], dtype=np.float64),
                smoothing=float(gnb["smoothing"]),
            )
        cfg = payload["config"]
        config = XnbConfig(
            kernel=cfg["kernel"],
            bandwidth_rule=cfg["bandwidth_rule"],
            mu=int(cfg["mu"]),
            theta=float(cfg["theta"]),
            floor=float(cfg["floor"]),
        )
        features = ClassFeatureMap(
            classes=classes,
            features={c: tuple(payload["features"][c]) for c in classes},
            theta=config.theta,
        )
        bank = {
            (c, v): KdeModel(
                np.array(entry["samples"], dtype=np.float64), float(entry["h"]), entry["kernel"]
            )
            for c, per_class in payload["kde"].items()
            for v, entry in per_class.items()
        }
        return XnbModel(
            classes=classes,
            priors=priors,
            features=features,
            kde_bank=bank,
            config=config,
            variable_names=variables,
            method=method,
        )
    except (KeyError, TypeError, ValueError) as exc:
        raise ModelFormatError(f"{path}: malformed model file ({exc})") from exc


__all__ = [
    "XnbConfig",
    "XnbModel",
    "GnbModel",
    "Prediction",
    "fit_xnb",
    "fit_fnb",
    "fit_gnb",
    "predict_xnb",
    "predict_gnb",
    "predict",
    "save_model",
    "load_model",
    "MODEL_SCHEMA_VERSION",
    "DEFAULT_FLOOR",
    "FIT_STAGES",
]
