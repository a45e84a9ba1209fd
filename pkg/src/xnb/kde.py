"""One-dimensional Parzen-Rosenblatt density estimation.

Kernels: the Gaussian plus the beta polynomial family
``K_s(u) = (2s+1)!! / (2^(s+1) s!) * (1 - u^2)^s`` on [-1, 1], which covers
uniform (s=0), Epanechnikov (s=1), biweight (s=2) and triweight (s=3). All
are second-order kernels, so every estimate is a genuine density.

Bandwidths come from reference rules (Scott, Silverman, and Silverman's
adaptive variant); point evaluation is always the exact sum over samples,
never a grid interpolation, so prediction accuracy does not depend on the
grid resolution used elsewhere.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

DEFAULT_KERNEL = "gaussian"
DEFAULT_RULE = "silverman"
DEFAULT_MU = 50

# beta-family exponent s per kernel name
_BETA_EXPONENT = {"uniform": 0, "epanechnikov": 1, "biweight": 2, "triweight": 3}

KERNELS = ("gaussian",) + tuple(_BETA_EXPONENT)
BANDWIDTH_RULES = ("scott", "silverman", "silverman_adaptive")

_SQRT_2PI = math.sqrt(2.0 * math.pi)


def _double_factorial(n: int) -> int:
    return math.prod(range(n, 0, -2))


def beta_coefficient(s: int) -> float:
    """Normalizing constant (2s+1)!! / (2^(s+1) s!) of the beta family."""
    return _double_factorial(2 * s + 1) / (2 ** (s + 1) * math.factorial(s))


def canonical_kernel(name: str) -> str:
    kernel = name.strip().lower()
    if kernel not in KERNELS:
        raise ValueError(f"unknown kernel {name!r}; expected one of {', '.join(KERNELS)}")
    return kernel


def canonical_rule(name: str) -> str:
    rule = name.strip().lower().replace("-", "_")
    if rule not in BANDWIDTH_RULES:
        raise ValueError(f"unknown bandwidth rule {name!r}; expected one of {', '.join(BANDWIDTH_RULES)}")
    return rule


def kernel_eval(kind: str, u):
    """Evaluate kernel ``kind`` at ``u`` (scalar or array)."""
    kind = canonical_kernel(kind)
    u = np.asarray(u, dtype=np.float64)
    if kind == "gaussian":
        out = np.exp(-0.5 * u * u) / _SQRT_2PI
    else:
        s = _BETA_EXPONENT[kind]
        body = (1.0 - u * u) ** s if s else np.ones_like(u)
        out = beta_coefficient(s) * np.where(np.abs(u) <= 1.0, body, 0.0)
    return float(out) if out.ndim == 0 else out


def scott_bandwidth(sigma, n: int):
    """Scott's data-based rule ``3.49 sigma n^(-1/3)``."""
    return 3.49 * sigma * n ** (-1.0 / 3.0)


def silverman_bandwidth(sigma, n: int):
    """Silverman's normalized reference rule ``1.059 sigma n^(-1/5)``."""
    return 1.059 * sigma * n ** (-0.2)


def silverman_adaptive_bandwidth(sigma, iqr, n: int):
    """Silverman's adaptive rule ``0.9 min(sigma, IQR/1.34) n^(-1/5)``."""
    return 0.9 * np.minimum(sigma, iqr / 1.34) * n ** (-0.2)


def _rule_from_stats(rule: str, sigma: float, iqr: float, n: int) -> float:
    if rule == "scott":
        return scott_bandwidth(sigma, n)
    if rule == "silverman":
        return silverman_bandwidth(sigma, n)
    return silverman_adaptive_bandwidth(sigma, iqr, n)


def fallback_bandwidth(scale: float) -> float:
    """Strictly positive bandwidth for degenerate inputs.

    ``scale`` should be the variable's value range over the whole dataset;
    constant-within-class variables then still get finite densities.
    """
    if not math.isfinite(scale) or scale <= 0.0:
        return 1e-9
    return max(1e-3 * scale, 1e-9)


def bandwidth(rule: str, values, fallback_scale: float | None = None) -> float:
    """Bandwidth of ``values`` under a named rule; never fails.

    sigma is the n-1 sample standard deviation (0 when n == 1) and the IQR
    uses linear-interpolation quartiles. A non-positive or non-finite result
    falls back to ``fallback_bandwidth`` with ``fallback_scale`` (the values'
    own range when not given).
    """
    rule = canonical_rule(rule)
    values = np.asarray(values, dtype=np.float64)
    if values.size == 0:
        raise ValueError("values must be nonempty")
    n = values.size
    sigma = float(np.std(values, ddof=1)) if n > 1 else 0.0
    if rule == "silverman_adaptive":
        q1, q3 = np.percentile(values, [25.0, 75.0])
        iqr = float(q3 - q1)
    else:
        iqr = 0.0
    h = _rule_from_stats(rule, sigma, iqr, n)
    if not math.isfinite(h) or h <= 0.0:
        if fallback_scale is None:
            fallback_scale = float(np.max(values) - np.min(values))
        h = fallback_bandwidth(fallback_scale)
    return h


@dataclass(frozen=True)
class KdeModel:
    """Fitted one-dimensional density: samples, bandwidth, kernel name."""

    samples: np.ndarray
    h: float
    kernel: str = DEFAULT_KERNEL

    def __post_init__(self):
        samples = np.ascontiguousarray(self.samples, dtype=np.float64)
        if samples.ndim != 1 or samples.size == 0:
            raise ValueError("samples must be a nonempty 1-d sequence")
        if not (math.isfinite(self.h) and self.h > 0):
            raise ValueError(f"bandwidth must be positive and finite, got {self.h}")
        samples.setflags(write=False)
        object.__setattr__(self, "samples", samples)
        object.__setattr__(self, "kernel", canonical_kernel(self.kernel))

    @property
    def n(self) -> int:
        return self.samples.size


def fit_kde(
    values,
    kernel: str = DEFAULT_KERNEL,
    rule: str = DEFAULT_RULE,
    fallback_scale: float | None = None,
) -> KdeModel:
    """Fit a KdeModel with the bandwidth chosen by ``rule``."""
    values = np.asarray(values, dtype=np.float64)
    if values.size == 0:
        raise ValueError("cannot fit a density to an empty sample")
    return KdeModel(values, bandwidth(rule, values, fallback_scale), kernel)


def kde_on_grid(model: KdeModel, grid) -> np.ndarray:
    """Density at each grid point: exact (1/nh) sum of scaled kernels."""
    grid = np.asarray(grid, dtype=np.float64)
    if grid.size == 0:
        raise ValueError("grid must be nonempty")
    u = (grid[:, None] - model.samples[None, :]) / model.h
    return kernel_eval(model.kernel, u).sum(axis=1) / (model.n * model.h)


def kde_density_at(model: KdeModel, x: float) -> float:
    """Density at a single point (same summation as ``kde_on_grid``)."""
    return float(kde_on_grid(model, np.array([x], dtype=np.float64))[0])


def make_grid(values, mu: int = DEFAULT_MU) -> np.ndarray:
    """``mu`` equally spaced points spanning the values' full range.

    The range is taken over everything passed in (all classes share one
    grid). A constant variable yields a grid widened to +-1 around it.
    """
    if mu < 2:
        raise ValueError(f"mu must be at least 2, got {mu}")
    values = np.asarray(values, dtype=np.float64)
    if values.size == 0:
        raise ValueError("values must be nonempty")
    lo = float(np.min(values))
    hi = float(np.max(values))
    if lo == hi:
        lo, hi = lo - 1.0, hi + 1.0
    return np.linspace(lo, hi, mu)
