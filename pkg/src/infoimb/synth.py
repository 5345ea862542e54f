"""Seeded synthetic panels for validating the imbalance, selection and GP pipeline.

All randomness comes from ``numpy.random.Generator(PCG64(seed))``; the
draw order inside each regime is fixed, so a (regime, parameters, seed)
triple always yields the same panel.

Regimes
-------
independent_noise
    ``x, y ~ N(0, 1)`` independent.
linear_noise
    ``x ~ N(0, 1)``, ``y = x + sigma * e``.
quadratic
    ``x ~ U(-1, 1)``, ``y = x**2 + sigma * e``.
multivariate_sum
    ``x1, x2 ~ U(0, 1)``, ``y = x1 + x2 + sigma * e`` plus ``n_noise``
    uniform distractor columns.
informative_plus_noise
    ``d_inf`` informative and ``d_noise`` distractor ``N(0, 1)`` columns,
    ``y = sum(sin(2 x_i)) / c + sigma * e`` over the informative columns,
    with ``c`` chosen so the signal has unit variance.
ar1
    ``y_t = phi * y_{t-1} + e_t`` started from the stationary law, plus
    ``n_noise`` independent AR(1) distractors with the same ``phi``.
trend_plus_wiggle
    Business-daily ``value = trend + amplitude * sin(2 pi t / 2.5) + 0.1 e``
    with a slow ``trend`` column kept alongside for reference.
weekly_driver
    Business-daily panel whose information peaks at weekly sampling. A smooth
    latent ``w`` (four sinusoids with periods of 15 to 30 business days, unit
    variance) drives ``y = sin(2 w) + sigma * e``; ``driver = w + 0.2 e``.
    Daily data drown the link in target noise, monthly data have too few
    points to resolve the sine, weekly data do both. The ``n*`` columns are
    independent latents of the same kind.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import DataError
from .ingest import AlignedPanel, Frequency, TimeSeries

REGIMES = (
    "independent_noise",
    "linear_noise",
    "quadratic",
    "multivariate_sum",
    "informative_plus_noise",
    "ar1",
    "trend_plus_wiggle",
    "weekly_driver",
)
TEMPORAL = ("ar1", "trend_plus_wiggle", "weekly_driver")
_SIN2_VAR = (1.0 - math.exp(-8.0)) / 2.0  # Var[sin(2x)] for x ~ N(0, 1)
START = np.datetime64("2014-01-06")  # a Monday, so business days fill whole ISO weeks


@dataclass(frozen=True)
class SynthSpec:
    regime: str
    n: int = 1000
    seed: int = 0
    sigma: float | None = None
    phi: float = 0.95
    d_inf: int = 3
    d_noise: int = 27
    n_noise: int = 0
    amplitude: float = 1.0

    def __post_init__(self):
        if self.regime not in REGIMES:
            raise DataError(f"unknown regime {self.regime!r}; choose from {', '.join(REGIMES)}")
        if self.n < 10:
            raise DataError("n must be at least 10")
        if self.sigma is not None and self.sigma < 0:
            raise DataError("sigma must be non-negative")
        if not -1 < self.phi < 1:
            raise DataError("phi must lie in (-1, 1)")
        if self.d_inf < 1 or self.d_noise < 0 or self.n_noise < 0:
            raise DataError("column counts must be non-negative (d_inf >= 1)")

    @property
    def noise(self) -> float:
        if self.sigma is not None:
            return self.sigma
        return {"linear_noise": 0.5, "quadratic": 0.01, "informative_plus_noise": 0.1,
                "ar1": 1.0, "weekly_driver": 0.3}.get(self.regime, 0.0)


def rng_for(seed: int) -> np.random.Generator:
    return np.random.Generator(np.random.PCG64(seed))


def business_days(n: int, start=START) -> np.ndarray:
    return np.busday_offset(np.datetime64(start, "D"), np.arange(n), roll="forward")


def _ar1(rng: np.random.Generator, n: int, phi: float, scale: float = 1.0) -> np.ndarray:
    e = rng.standard_normal(n) * scale
    out = np.empty(n)
    out[0] = e[0] / math.sqrt(1.0 - phi * phi)
    for t in range(1, n):
        out[t] = phi * out[t - 1] + e[t]
    return out


def _oscillation(rng: np.random.Generator, t: np.ndarray, components: int = 4,
                 periods: tuple[float, float] = (15.0, 30.0)) -> np.ndarray:
    """Unit-variance sum of sinusoids with random periods and phases."""
    amp = math.sqrt(2.0 / components)
    out = np.zeros_like(t)
    for _ in range(components):
        period = rng.uniform(*periods)
        out += amp * np.sin(2.0 * np.pi * t / period + rng.uniform(0.0, 2.0 * np.pi))
    return out


def _raw(spec: SynthSpec) -> tuple[list[str], np.ndarray]:
    rng = rng_for(spec.seed)
    n, s = spec.n, spec.noise
    r = spec.regime
    if r == "independent_noise":
        x = rng.standard_normal(n)
        y = rng.standard_normal(n)
        return ["y", "x"], np.column_stack([y, x])
    if r == "linear_noise":
        x = rng.standard_normal(n)
        y = x + s * rng.standard_normal(n)
        return ["y", "x"], np.column_stack([y, x])
    if r == "quadratic":
        x = rng.uniform(-1.0, 1.0, n)
        y = x * x + s * rng.standard_normal(n)
        return ["y", "x"], np.column_stack([y, x])
    if r == "multivariate_sum":
        xs = rng.uniform(0.0, 1.0, (n, 2))
        y = xs.sum(axis=1) + s * rng.standard_normal(n)
        noise = rng.uniform(0.0, 1.0, (n, spec.n_noise))
        names = ["y", "x1", "x2"] + [f"n{i + 1}" for i in range(spec.n_noise)]
        return names, np.column_stack([y, xs, noise])
    if r == "informative_plus_noise":
        xs = rng.standard_normal((n, spec.d_inf))
        noise = rng.standard_normal((n, spec.d_noise))
        signal = np.sin(2.0 * xs).sum(axis=1) / math.sqrt(spec.d_inf * _SIN2_VAR)
        y = signal + s * rng.standard_normal(n)
        names = ["y"] + [f"x{i + 1}" for i in range(spec.d_inf)] + [f"n{i + 1}" for i in range(spec.d_noise)]
        return names, np.column_stack([y, xs, noise])
    if r == "ar1":
        cols = [_ar1(rng, n, spec.phi, s) for _ in range(1 + spec.n_noise)]
        return ["y"] + [f"n{i + 1}" for i in range(spec.n_noise)], np.column_stack(cols)
    if r == "trend_plus_wiggle":
        t = np.arange(n, dtype=np.float64)
        trend = 0.01 * t + 2.0 * np.sin(2.0 * np.pi * t / 130.0)
        wiggle = spec.amplitude * np.sin(2.0 * np.pi * t / 2.5) + 0.1 * rng.standard_normal(n)
        return ["value", "trend"], np.column_stack([trend + wiggle, trend])
    if r == "weekly_driver":
        t = np.arange(n, dtype=np.float64)
        w = _oscillation(rng, t)
        y = np.sin(2.0 * w) + s * rng.standard_normal(n)
        driver = w + 0.2 * rng.standard_normal(n)
        noise = [_oscillation(rng, t) + 0.2 * rng.standard_normal(n) for _ in range(spec.n_noise)]
        names = ["y", "driver"] + [f"n{i + 1}" for i in range(spec.n_noise)]
        return names, np.column_stack([y, driver, *noise])
    raise DataError(f"unknown regime {r!r}")


def generate(spec: SynthSpec) -> AlignedPanel:
    """Standardized panel on a business-day grid; the target column is ``y``
    (``value`` for trend_plus_wiggle)."""
    names, raw = _raw(spec)
    return AlignedPanel.from_raw(business_days(spec.n), names, raw, names[0], Frequency.DAILY)


def generate_series(spec: SynthSpec) -> list[TimeSeries]:
    """Raw daily series of the same draw, for the resampling workflows."""
    names, raw = _raw(spec)
    dates = business_days(spec.n)
    return [TimeSeries(name, dates, raw[:, j], Frequency.DAILY) for j, name in enumerate(names)]


def documented_moments(spec: SynthSpec) -> dict[str, tuple[float, float]]:
    """Population (mean, std) of each column for the i.i.d. regimes; temporal regimes are
    serially dependent and document none."""
    s = spec.noise
    r = spec.regime
    if r == "independent_noise":
        return {"y": (0.0, 1.0), "x": (0.0, 1.0)}
    if r == "linear_noise":
        return {"y": (0.0, math.sqrt(1.0 + s * s)), "x": (0.0, 1.0)}
    if r == "quadratic":
        return {"y": (1.0 / 3.0, math.sqrt(4.0 / 45.0 + s * s)), "x": (0.0, math.sqrt(1.0 / 3.0))}
    if r == "multivariate_sum":
        u = (0.5, math.sqrt(1.0 / 12.0))
        out = {"y": (1.0, math.sqrt(1.0 / 6.0 + s * s)), "x1": u, "x2": u}
        out.update({f"n{i + 1}": u for i in range(spec.n_noise)})
        return out
    if r == "informative_plus_noise":
        out = {"y": (0.0, math.sqrt(1.0 + s * s))}
        out.update({f"x{i + 1}": (0.0, 1.0) for i in range(spec.d_inf)})
        out.update({f"n{i + 1}": (0.0, 1.0) for i in range(spec.d_noise)})
        return out
    return {}
