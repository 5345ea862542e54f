"""Gaussian Process regression with a Matern kernel and zero prior mean.

Targets are standardized inside :func:`fit`, so the prior has unit variance
and a zero mean function is appropriate; predictions are mapped back to the
original units. Only the length scale is a free hyperparameter and it is
chosen by maximizing the log marginal likelihood.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, replace

import numpy as np
from scipy.linalg import LinAlgError, cho_solve, cholesky, solve_triangular
from scipy.spatial.distance import cdist, pdist

from .errors import DataError, GPFitError

SUPPORTED_NU = (0.5, 1.5, 2.5)
NOISE_FLOOR = 1e-10
JITTER_LADDER = (0.0, 1e-10, 1e-8, 1e-6)
RELATIVE_BOUNDS = (1e-2, 1e3)
GRID_POINTS = 16
GOLDEN_TOL = 1e-6  # bracket width in log(l)
_LOG_2PI = math.log(2.0 * math.pi)
_INVPHI = (math.sqrt(5.0) - 1.0) / 2.0


@dataclass(frozen=True)
class KernelConfig:
    """Matern kernel settings.

    ``bounds`` are absolute length-scale limits for the optimizer; ``None``
    means ``RELATIVE_BOUNDS`` times the median pairwise input distance.
    ``at_bound`` is set by :func:`optimize_length_scale` when the optimum sits
    on a bound.
    """

    nu: float = 1.5
    length_scale: float = 1.0
    bounds: tuple[float, float] | None = None
    at_bound: bool = False

    def __post_init__(self):
        if self.nu not in SUPPORTED_NU:
            raise DataError(f"nu must be one of {SUPPORTED_NU}, got {self.nu}")
        if not self.length_scale > 0:
            raise DataError(f"length scale must be positive, got {self.length_scale}")
        if self.bounds is not None:
            lo, hi = self.bounds
            if not 0 < lo < hi:
                raise DataError(f"invalid length-scale bounds {self.bounds}")


def matern(r: np.ndarray, length_scale: float, nu: float = 1.5) -> np.ndarray:
    """Matern correlation as a function of distance (closed forms for half-integer nu)."""
    if not length_scale > 0:
        raise DataError(f"length scale must be positive, got {length_scale}")
    r = np.asarray(r, dtype=np.float64)
    if nu == 0.5:
        return np.exp(-r / length_scale)
    if nu == 1.5:
        a = math.sqrt(3.0) * r / length_scale
        return (1.0 + a) * np.exp(-a)
    if nu == 2.5:
        a = math.sqrt(5.0) * r / length_scale
        return (1.0 + a + a * a / 3.0) * np.exp(-a)
    raise DataError(f"nu must be one of {SUPPORTED_NU}, got {nu}")


def matern_dl(r: np.ndarray, length_scale: float, nu: float = 1.5) -> np.ndarray:
    """Derivative of :func:`matern` with respect to the length scale."""
    r = np.asarray(r, dtype=np.float64)
    l = length_scale
    if nu == 0.5:
        return (r / (l * l)) * np.exp(-r / l)
    if nu == 1.5:
        a = math.sqrt(3.0) * r / l
        return a * a * np.exp(-a) / l
    if nu == 2.5:
        a = math.sqrt(5.0) * r / l
        return a * a * (1.0 + a) * np.exp(-a) / (3.0 * l)
    raise DataError(f"nu must be one of {SUPPORTED_NU}, got {nu}")


def matern_kernel(x, x2, config: KernelConfig) -> float:
    r = float(np.linalg.norm(np.atleast_1d(np.asarray(x, float)) - np.atleast_1d(np.asarray(x2, float))))
    return float(matern(r, config.length_scale, config.nu))


def _as_inputs(inputs) -> np.ndarray:
    x = np.asarray(inputs, dtype=np.float64)
    if x.ndim == 1:
        x = x[:, None]
    if x.ndim != 2:
        raise DataError("inputs must be an M x d array")
    return x


def kernel_matrix(a, b, config: KernelConfig) -> np.ndarray:
    return matern(cdist(_as_inputs(a), _as_inputs(b)), config.length_scale, config.nu)


def _standardize(y: np.ndarray) -> tuple[np.ndarray, float, float]:
    mean = float(y.mean())
    std = float(y.std(ddof=1)) if y.size > 1 else 0.0
    if not std > 0:
        std = 1.0
    return (y - mean) / std, mean, std


def _noise_vector(sigma_n_sq, m: int) -> np.ndarray:
    noise = np.broadcast_to(np.asarray(sigma_n_sq, dtype=np.float64), (m,)).copy()
    if np.any(noise < 0):
        raise DataError("noise variance must be non-negative")
    noise[noise == 0] = NOISE_FLOOR
    return noise


def _factorize(k: np.ndarray, noise: np.ndarray) -> tuple[np.ndarray, float]:
    """Cholesky of ``k + diag(noise)``, escalating diagonal jitter on failure."""
    for jitter in JITTER_LADDER:
        a = k.copy()
        a[np.diag_indices_from(a)] += noise + jitter
        try:
            return cholesky(a, lower=True, check_finite=False), jitter
        except LinAlgError:
            continue
    raise GPFitError("kernel matrix not positive definite after jitter escalation to 1e-6")


@dataclass(frozen=True)
class GPFit:
    train_inputs: np.ndarray
    train_targets: np.ndarray
    kernel: KernelConfig
    sigma_n_sq: np.ndarray | float
    factor: np.ndarray
    alpha: np.ndarray
    y_mean: float
    y_std: float
    jitter: float = 0.0

    def system_matrix(self) -> np.ndarray:
        """``K + sigma_n^2 I`` exactly as factorized (noise floor and jitter included)."""
        k = kernel_matrix(self.train_inputs, self.train_inputs, self.kernel)
        k[np.diag_indices_from(k)] += _noise_vector(self.sigma_n_sq, k.shape[0]) + self.jitter
        return k

    def _cross(self, query) -> np.ndarray:
        q = _as_inputs(query)
        if q.shape[1] != self.train_inputs.shape[1]:
            raise DataError(
                f"query dimension {q.shape[1]} does not match training dimension {self.train_inputs.shape[1]}"
            )
        return kernel_matrix(self.train_inputs, q, self.kernel)

    def predict_mean(self, query) -> np.ndarray:
        """Posterior mean in original units at each query row."""
        return self._cross(query).T @ self.alpha * self.y_std + self.y_mean

    def predict_var(self, query) -> np.ndarray:
        """Posterior variance of the standardized latent function, clamped at zero."""
        v = solve_triangular(self.factor, self._cross(query), lower=True, check_finite=False)
        return np.maximum(1.0 - np.einsum("ij,ij->j", v, v), 0.0)


def fit(inputs, targets, config: KernelConfig | None = None, sigma_n_sq=1e-3) -> GPFit:
    """Condition the GP on ``(inputs, targets)``.

    ``sigma_n_sq`` is in standardized-target units; a zero is replaced by a
    1e-10 floor. It may also be a length-M array of per-point noise.
    """
    config = config or KernelConfig()
    x = _as_inputs(inputs)
    y = np.asarray(targets, dtype=np.float64).ravel()
    if y.size != x.shape[0]:
        raise DataError("inputs and targets have different lengths")
    if y.size < 1:
        raise DataError("no training points")
    if not (np.all(np.isfinite(x)) and np.all(np.isfinite(y))):
        raise DataError("non-finite training data")
    z, mean, std = _standardize(y)
    noise = _noise_vector(sigma_n_sq, y.size)
    k = kernel_matrix(x, x, config)
    factor, jitter = _factorize(k, noise)
    alpha = cho_solve((factor, True), z, check_finite=False)
    return GPFit(x, z, config, sigma_n_sq, factor, alpha, mean, std, jitter)


def predict_mean(fit: GPFit, query) -> np.ndarray:
    return fit.predict_mean(query)


def predict_var(fit: GPFit, query) -> np.ndarray:
    return fit.predict_var(query)


def _lml_from_distances(dist: np.ndarray, z: np.ndarray, length_scale: float, nu: float,
                        noise: np.ndarray, with_grad: bool = False):
    k = matern(dist, length_scale, nu)
    a = k
    a[np.diag_indices_from(a)] += noise
    try:
        factor = cholesky(a, lower=True, check_finite=False)
    except LinAlgError:
        return (-np.inf, np.nan) if with_grad else -np.inf
    alpha = cho_solve((factor, True), z, check_finite=False)
    m = z.size
    value = -0.5 * float(z @ alpha) - float(np.log(np.diag(factor)).sum()) - 0.5 * m * _LOG_2PI
    if not with_grad:
        return value
    dk = matern_dl(dist, length_scale, nu)
    a_inv = cho_solve((factor, True), np.eye(m), check_finite=False)
    grad = 0.5 * float(alpha @ dk @ alpha) - 0.5 * float(np.sum(a_inv * dk))
    return value, grad


def log_marginal_likelihood(inputs, targets, length_scale: float, nu: float = 1.5,
                            sigma_n_sq=1e-3, standardize: bool = True) -> float:
    """``log p(y | l)`` for the (by default standardized) targets."""
    x = _as_inputs(inputs)
    y = np.asarray(targets, dtype=np.float64).ravel()
    z = _standardize(y)[0] if standardize else y
    return _lml_from_distances(cdist(x, x), z, length_scale, nu, _noise_vector(sigma_n_sq, z.size))


def log_marginal_likelihood_grad(inputs, targets, length_scale: float, nu: float = 1.5,
                                 sigma_n_sq=1e-3, standardize: bool = True) -> float:
    """Analytic ``d log p(y | l) / dl``."""
    x = _as_inputs(inputs)
    y = np.asarray(targets, dtype=np.float64).ravel()
    z = _standardize(y)[0] if standardize else y
    return _lml_from_distances(cdist(x, x), z, length_scale, nu, _noise_vector(sigma_n_sq, z.size),
                               with_grad=True)[1]


def default_bounds(inputs) -> tuple[float, float]:
    x = _as_inputs(inputs)
    d = pdist(x) if x.shape[0] > 1 else np.array([])
    d = d[d > 0]
    scale = float(np.median(d)) if d.size else 1.0
    return RELATIVE_BOUNDS[0] * scale, RELATIVE_BOUNDS[1] * scale


def optimize_length_scale(inputs, targets, config: KernelConfig | None = None, sigma_n_sq=1e-3) -> KernelConfig:
    """Maximum-likelihood length scale within bounds.

    A 16-point log-spaced grid brackets the best region, then golden-section
    search on ``log l`` refines it between the best grid point's neighbours.
    Deterministic; returns a config with ``length_scale`` set and ``at_bound``
    flagged when the optimum touches a bound.
    """
    config = config or KernelConfig()
    x = _as_inputs(inputs)
    y = np.asarray(targets, dtype=np.float64).ravel()
    z = _standardize(y)[0]
    noise = _noise_vector(sigma_n_sq, z.size)
    dist = cdist(x, x)
    lo, hi = config.bounds if config.bounds is not None else default_bounds(x)
    log_lo, log_hi = math.log(lo), math.log(hi)

    cache: dict[float, float] = {}

    def objective(log_l: float) -> float:
        if log_l not in cache:
            cache[log_l] = _lml_from_distances(dist, z, math.exp(log_l), config.nu, noise)
        return cache[log_l]

    grid = np.linspace(log_lo, log_hi, GRID_POINTS)
    values = np.array([objective(float(g)) for g in grid])
    if not np.any(np.isfinite(values)):
        raise GPFitError("log marginal likelihood could not be evaluated at any length scale")
    best = int(np.argmax(values))
    a = float(grid[max(best - 1, 0)])
    b = float(grid[min(best + 1, GRID_POINTS - 1)])

    c = b - _INVPHI * (b - a)
    d = a + _INVPHI * (b - a)
    fc, fd = objective(c), objective(d)
    while b - a > GOLDEN_TOL:
        if fc >= fd:
            b, d, fd = d, c, fc
            c = b - _INVPHI * (b - a)
            fc = objective(c)
        else:
            a, c, fc = c, d, fd
            d = a + _INVPHI * (b - a)
            fd = objective(d)
    for edge in (a, b):
        objective(edge)
    log_best = max(cache, key=lambda k: (cache[k], -k))
    at_bound = min(abs(log_best - log_lo), abs(log_best - log_hi)) < 1e-3
    return replace(config, length_scale=math.exp(log_best), bounds=(lo, hi), at_bound=at_bound)


def fit_optimized(inputs, targets, config: KernelConfig | None = None, sigma_n_sq=1e-3) -> GPFit:
    """:func:`optimize_length_scale` followed by :func:`fit`."""
    tuned = optimize_length_scale(inputs, targets, config, sigma_n_sq)
    return fit(inputs, targets, tuned, sigma_n_sq)
