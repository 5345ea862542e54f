"""GP nowcasting and one-step forecasting with contiguous k-fold cross-validation.

Three ways of choosing predictors are compared: the greedy imbalance
selection (``selected``), every available column (``all``), and repeated
random draws of the same size (``random``). Errors are squared differences on
the target standardized with the training fold's mean and std.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Sequence

import numpy as np

from . import gp
from .errors import DataError, NumericalError
from .greedy import GreedyTrace, greedy_select
from .ingest import AlignedPanel
from .scan import candidate_pool, shift_panel
from .synth import rng_for

MODES = ("selected", "all", "random")


@dataclass(frozen=True)
class ForecastConfig:
    delta_t: int = 0
    mode: str = "selected"
    k: int = 3
    replications: int = 10
    seed: int = 0
    cv_folds: int = 5
    kernel: gp.KernelConfig = field(default_factory=gp.KernelConfig)
    sigma_n_sq: float = 1e-3

    def __post_init__(self):
        if self.mode not in MODES:
            raise DataError(f"mode must be one of {MODES}, got {self.mode!r}")
        if self.delta_t not in (0, 1):
            raise DataError("delta_t must be 0 or 1")
        if self.k < 1 or self.replications < 1:
            raise DataError("k and replications must be at least 1")
        if self.cv_folds < 2:
            raise DataError("cv_folds must be at least 2")


@dataclass
class CVRun:
    """Cross-validation of one predictor set; paths are in original target units."""

    predictors: list[str]
    fold_mse: list[float]
    length_scales: list[float]
    dates: np.ndarray
    realized: np.ndarray
    predicted: np.ndarray
    fold: np.ndarray

    @property
    def surviving(self) -> np.ndarray:
        return np.array([np.isfinite(m) for m in self.fold_mse])

    @property
    def mse_mean(self) -> float:
        return float(np.mean(np.asarray(self.fold_mse)[self.surviving]))

    @property
    def mse_std(self) -> float:
        vals = np.asarray(self.fold_mse)[self.surviving]
        return float(np.std(vals, ddof=1)) if vals.size > 1 else 0.0

    @property
    def residuals(self) -> np.ndarray:
        return self.realized - self.predicted

    def to_dict(self) -> dict:
        return {
            "predictors": list(self.predictors),
            "fold_mse": [None if not np.isfinite(m) else m for m in self.fold_mse],
            "length_scales": [None if not np.isfinite(l) else l for l in self.length_scales],
            "mse_mean": self.mse_mean,
            "mse_std": self.mse_std,
        }


@dataclass
class ForecastReport:
    mode: str
    delta_t: int
    target: str
    runs: list[CVRun]

    @property
    def mse_mean(self) -> float:
        return float(np.mean([r.mse_mean for r in self.runs]))

    @property
    def mse_std(self) -> float:
        """Std over folds for a single run, over replication means for random mode."""
        if len(self.runs) == 1:
            return self.runs[0].mse_std
        return float(np.std([r.mse_mean for r in self.runs], ddof=1))

    @property
    def fold_mse(self) -> list[float]:
        return self.runs[0].fold_mse

    def table_row(self) -> dict:
        return {"mode": self.mode, "delta_t": self.delta_t, "mse_mean": self.mse_mean, "mse_std": self.mse_std}

    def to_dict(self) -> dict:
        return {**self.table_row(), "target": self.target, "scale": "standardized",
                "runs": [r.to_dict() for r in self.runs]}

    def path_rows(self) -> list[dict]:
        rows = []
        for rep, run in enumerate(self.runs):
            for d, obs, pred, f in zip(run.dates, run.realized, run.predicted, run.fold):
                rows.append({"date": str(d), "realized": float(obs), "predicted": float(pred),
                             "fold": int(f), "replication": rep})
        return rows


def contiguous_folds(n: int, folds: int) -> list[np.ndarray]:
    """Split ``range(n)`` into ``folds`` time-ordered blocks of near-equal size."""
    if n // folds < 2:
        raise DataError(f"{n} rows cannot form {folds} folds of at least 2 points")
    return np.array_split(np.arange(n), folds)


def cross_validate(panel: AlignedPanel, predictors: Sequence[str], config: ForecastConfig) -> CVRun:
    """Fit on the complement of each fold (ML length scale per fit) and predict the fold."""
    predictors = list(predictors)
    if not predictors:
        raise DataError("empty predictor set")
    x = panel.matrix(predictors)
    y = panel.raw(panel.target_name)
    n = panel.n
    predicted = np.full(n, np.nan)
    fold_of = np.empty(n, dtype=np.int64)
    fold_mse, scales = [], []
    for f, held in enumerate(contiguous_folds(n, config.cv_folds)):
        train = np.setdiff1d(np.arange(n), held, assume_unique=True)
        fold_of[held] = f
        try:
            model = gp.fit_optimized(x[train], y[train], config.kernel, config.sigma_n_sq)
        except NumericalError:
            fold_mse.append(float("nan"))
            scales.append(float("nan"))
            continue
        pred = model.predict_mean(x[held])
        predicted[held] = pred
        fold_mse.append(float(np.mean(((pred - y[held]) / model.y_std) ** 2)))
        scales.append(model.kernel.length_scale)
    if not any(np.isfinite(fold_mse)):
        raise NumericalError("every cross-validation fold failed to fit")
    ok = np.isfinite(predicted)
    return CVRun(predictors, fold_mse, scales, panel.grid[ok], y[ok], predicted[ok], fold_of[ok])


def _selected_predictors(panel: AlignedPanel, config: ForecastConfig, trace: GreedyTrace | None) -> list[str]:
    if trace is None:
        trace = greedy_select(panel, candidate_pool(panel), panel.target_name, max_k=config.k,
                              epsilon=-np.inf)
    return trace.selected[: config.k]


def run_forecast(panel: AlignedPanel, config: ForecastConfig, trace: GreedyTrace | None = None) -> ForecastReport:
    """Cross-validated GP performance of one predictor-selection mode.

    ``panel`` is unshifted; for ``delta_t = 1`` it is shifted here and the
    lagged target becomes a candidate. In selected mode a supplied ``trace``
    (computed on the shifted panel) is used, otherwise greedy selection runs
    on the whole panel.
    """
    shifted = shift_panel(panel, config.delta_t)
    pool = sorted(candidate_pool(shifted))
    if config.mode == "selected":
        sets = [_selected_predictors(shifted, config, trace)]
    elif config.mode == "all":
        sets = [pool]
    else:
        if config.k > len(pool):
            raise DataError(f"cannot draw {config.k} of {len(pool)} candidates")
        rng = rng_for(config.seed)
        sets = [[pool[i] for i in sorted(rng.choice(len(pool), config.k, replace=False))]
                for _ in range(config.replications)]
    runs = [cross_validate(shifted, s, config) for s in sets]
    return ForecastReport(config.mode, config.delta_t, shifted.target_name, runs)


def predict_path(panel: AlignedPanel, config: ForecastConfig, trace: GreedyTrace) -> ForecastReport:
    """Out-of-fold predicted vs realized target path for the traced predictor set."""
    if trace is None or not trace.steps:
        raise DataError("empty predictor set")
    sel = ForecastConfig(config.delta_t, "selected", len(trace.steps), config.replications, config.seed,
                         config.cv_folds, config.kernel, config.sigma_n_sq)
    return run_forecast(panel, sel, trace)


def compare_modes(panel: AlignedPanel, config: ForecastConfig) -> list[ForecastReport]:
    """selected(k), all and random(k) x replications on the same panel."""
    out = []
    for mode in MODES:
        cfg = ForecastConfig(config.delta_t, mode, config.k, config.replications, config.seed,
                             config.cv_folds, config.kernel, config.sigma_n_sq)
        out.append(run_forecast(panel, cfg))
    return out


def r_squared(run: CVRun) -> float:
    resid = run.residuals
    centered = run.realized - run.realized.mean()
    return float(1.0 - (resid @ resid) / (centered @ centered))
