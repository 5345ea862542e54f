"""GP-based change of sampling frequency.

Imputation (coarse -> fine) fits a low-noise GP through the observations;
aggregation (fine -> coarse) fits a GP whose noise equals the average rolling
variance over one target period, so within-period oscillations are treated
as noise and smoothed away. In both cases the posterior mean is read off at
period-end dates inside the source span.

Time enters the kernel as days since the first observation divided by the
median spacing of the source, so the length-scale bounds scale with the
native frequency.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Sequence

import numpy as np
from numpy.lib.stride_tricks import sliding_window_view

from . import gp
from .errors import AlignmentError, DataError
from .ingest import AlignedPanel, Frequency, TimeSeries, align, as_frequency, median_spacing_days

IMPUTE_NOISE = 1e-3
NOISE_FLOOR = 1e-10

IMPUTE = "impute"
AGGREGATE = "aggregate"


@dataclass(frozen=True)
class ResampleSpec:
    """What to do with one series. ``sigma_n_sq=None`` selects the mode's default noise rule
    (1e-3 for imputation, rolling variance for aggregation)."""

    mode: str
    target_frequency: Frequency
    source: str
    sigma_n_sq: float | None = None

    def __post_init__(self):
        if self.mode not in (IMPUTE, AGGREGATE):
            raise DataError(f"unknown resample mode {self.mode!r}")
        object.__setattr__(self, "target_frequency", as_frequency(self.target_frequency))


def _days(dates) -> np.ndarray:
    return np.asarray(dates, dtype="datetime64[D]").astype(np.int64)


def weekday(dates) -> np.ndarray:
    """ISO weekday with Monday = 0."""
    return (_days(dates) + 3) % 7


def _friday_of_week(dates) -> np.ndarray:
    d = np.asarray(dates, dtype="datetime64[D]")
    return d + (4 - weekday(d)).astype("timedelta64[D]")


def _month_end(dates) -> np.ndarray:
    d = np.asarray(dates, dtype="datetime64[D]")
    return (d.astype("datetime64[M]") + 1).astype("datetime64[D]") - 1


def _quarter_end(dates) -> np.ndarray:
    months = np.asarray(dates, dtype="datetime64[D]").astype("datetime64[M]").astype(np.int64)
    last_month = (months // 3) * 3 + 2
    return (last_month.astype("datetime64[M]") + 1).astype("datetime64[D]") - 1


def period_end(dates, frequency: Frequency | str) -> np.ndarray:
    """Snap dates to the end of their period (biweekly snaps to the ISO-week Friday)."""
    frequency = as_frequency(frequency)
    d = np.asarray(dates, dtype="datetime64[D]")
    if frequency is Frequency.DAILY:
        return d.copy()
    if frequency in (Frequency.WEEKLY, Frequency.BIWEEKLY):
        return _friday_of_week(d)
    if frequency is Frequency.MONTHLY:
        return _month_end(d)
    return _quarter_end(d)


def make_grid(first, last, frequency: Frequency | str) -> np.ndarray:
    """Period-end dates inside ``[first, last]``.

    Daily means business days. Weekly uses ISO-week Fridays; biweekly takes
    every second Friday starting with the first ISO week that lies entirely
    in the range.
    """
    frequency = as_frequency(frequency)
    first = np.datetime64(first, "D")
    last = np.datetime64(last, "D")
    if last < first:
        return np.array([], dtype="datetime64[D]")
    days = np.arange(first, last + 1, dtype="datetime64[D]")
    if frequency is Frequency.DAILY:
        return days[weekday(days) < 5]
    if frequency is Frequency.WEEKLY:
        return days[weekday(days) == 4]
    if frequency is Frequency.BIWEEKLY:
        monday = first + ((7 - weekday(first)) % 7).astype("timedelta64[D]")
        start = monday + np.timedelta64(4, "D")
        return np.arange(start, last + 1, np.timedelta64(14, "D"), dtype="datetime64[D]")
    ends = np.unique(period_end(days, frequency))
    return ends[(ends >= first) & (ends <= last)]


def _time_axis(source: np.ndarray, spacing: float, dates: np.ndarray) -> np.ndarray:
    return (_days(dates) - _days(source[:1])[0]) / spacing


def gp_resample(series: TimeSeries, grid: np.ndarray, frequency: Frequency, sigma_n_sq: float,
                kernel: gp.KernelConfig | None = None) -> TimeSeries:
    """Fit a GP to ``series`` (ML length scale unless ``kernel`` fixes it) and
    return its posterior mean on ``grid``."""
    grid = np.asarray(grid, dtype="datetime64[D]")
    if grid.size == 0:
        raise DataError(f"{series.name}: no {frequency} period ends inside the series span")
    if grid[0] < series.first or grid[-1] > series.last:
        raise DataError(f"{series.name}: grid extends beyond the series span")
    spacing = median_spacing_days(series.timestamps)
    t = _time_axis(series.timestamps, spacing, series.timestamps)
    tq = _time_axis(series.timestamps, spacing, grid)
    if kernel is None:
        model = gp.fit_optimized(t, series.values, gp.KernelConfig(nu=1.5), sigma_n_sq)
    else:
        model = gp.fit(t, series.values, kernel, sigma_n_sq)
    return TimeSeries(series.name, grid, model.predict_mean(tq), frequency)


def _check_direction(series: TimeSeries, target: Frequency, finer: bool) -> None:
    if finer and not target.rank < series.frequency.rank:
        raise DataError(f"{series.name}: imputation needs a target finer than {series.frequency}, got {target}")
    if not finer and not target.rank > series.frequency.rank:
        raise DataError(f"{series.name}: aggregation needs a target coarser than {series.frequency}, got {target}")


def impute(series: TimeSeries, target_frequency: Frequency | str, grid=None,
           sigma_n_sq: float = IMPUTE_NOISE) -> TimeSeries:
    """Low-noise GP interpolation onto a finer period-end grid."""
    target_frequency = as_frequency(target_frequency)
    _check_direction(series, target_frequency, finer=True)
    if len(series) < 3:
        raise DataError(f"{series.name}: imputation needs at least 3 observations")
    if grid is None:
        grid = make_grid(series.first, series.last, target_frequency)
    return gp_resample(series, grid, target_frequency, sigma_n_sq)


def _period_labels(dates: np.ndarray, frequency: Frequency) -> np.ndarray:
    if frequency is Frequency.BIWEEKLY:
        return _days(_friday_of_week(dates)) // 14
    return _days(period_end(dates, frequency))


def points_per_period(series: TimeSeries, target_frequency: Frequency | str) -> int:
    """Median number of source observations per target period; partial end periods ignored
    when at least three periods are present."""
    target_frequency = as_frequency(target_frequency)
    _, counts = np.unique(_period_labels(series.timestamps, target_frequency), return_counts=True)
    if counts.size >= 3:
        counts = counts[1:-1]
    return max(int(round(float(np.median(counts)))), 2)


def rolling_variance(values: np.ndarray, window: int) -> float:
    """Mean sample variance over all full trailing windows."""
    values = np.asarray(values, dtype=np.float64)
    if window < 2:
        raise DataError("rolling window must cover at least 2 points")
    if window > values.size:
        raise DataError(f"rolling window of {window} points longer than series of {values.size}")
    return float(sliding_window_view(values, window).var(axis=1, ddof=1).mean())


def aggregation_noise(series: TimeSeries, target_frequency: Frequency | str) -> float:
    """Rolling-variance noise expressed in standardized units of ``series``."""
    window = points_per_period(series, target_frequency)
    if len(series) < 2 * window:
        raise DataError(f"{series.name}: need at least {2 * window} points to aggregate to {target_frequency}")
    raw = rolling_variance(series.values, window)
    total = float(np.var(series.values, ddof=1))
    if total == 0:
        return NOISE_FLOOR
    return max(raw / total, NOISE_FLOOR)


def aggregate(series: TimeSeries, target_frequency: Frequency | str, grid=None,
              sigma_n_sq: float | None = None) -> TimeSeries:
    """GP smoothing onto a coarser period-end grid with rolling-variance noise."""
    target_frequency = as_frequency(target_frequency)
    _check_direction(series, target_frequency, finer=False)
    if sigma_n_sq is None:
        sigma_n_sq = aggregation_noise(series, target_frequency)
    if grid is None:
        grid = make_grid(series.first, series.last, target_frequency)
    return gp_resample(series, grid, target_frequency, sigma_n_sq)


def pass_through(series: TimeSeries) -> TimeSeries:
    """Same values, dates snapped to period ends so mixed sources share one calendar."""
    dates = period_end(series.timestamps, series.frequency)
    if np.array_equal(dates, series.timestamps):
        return series
    return TimeSeries(series.name, dates, series.values, series.frequency)


def resample(series: TimeSeries, target_frequency: Frequency | str, mode: str | None = None,
             grid=None, sigma_n_sq: float | None = None) -> TimeSeries:
    """Route to impute/aggregate by frequency order; equal frequency returns ``series`` unchanged."""
    target_frequency = as_frequency(target_frequency)
    if mode is None:
        if target_frequency is series.frequency:
            return series
        mode = IMPUTE if target_frequency.rank < series.frequency.rank else AGGREGATE
    if mode == IMPUTE:
        return impute(series, target_frequency, grid, IMPUTE_NOISE if sigma_n_sq is None else sigma_n_sq)
    if mode == AGGREGATE:
        return aggregate(series, target_frequency, grid, sigma_n_sq)
    raise DataError(f"unknown resample mode {mode!r}")


def apply_spec(series: TimeSeries, spec: ResampleSpec, grid=None) -> TimeSeries:
    if spec.source != series.name:
        raise DataError(f"spec is for {spec.source!r}, got series {series.name!r}")
    return resample(series, spec.target_frequency, spec.mode, grid, spec.sigma_n_sq)


def common_grid(series: Sequence[TimeSeries], target_frequency: Frequency | str) -> np.ndarray:
    first = max(s.first for s in series)
    last = min(s.last for s in series)
    grid = make_grid(first, last, target_frequency)
    if grid.size == 0:
        raise AlignmentError("empty intersection of series dates")
    return grid


def resample_panel(series: Sequence[TimeSeries], target_frequency: Frequency | str,
                   target: str | None = None) -> AlignedPanel:
    """Bring every series to ``target_frequency`` on one shared grid and align.

    Finer series are aggregated, coarser ones imputed, equal ones passed
    through with period-end dates.
    """
    target_frequency = as_frequency(target_frequency)
    if not series:
        raise AlignmentError("no series to resample")
    grid = common_grid(series, target_frequency)
    out = []
    for s in series:
        if s.frequency is target_frequency:
            out.append(pass_through(s))
        elif s.frequency.rank > target_frequency.rank:
            out.append(impute(s, target_frequency, grid))
        else:
            out.append(aggregate(s, target_frequency, grid))
    return align(out, target_frequency, target)


def roughness(values) -> float:
    """Mean absolute lag-1 difference."""
    return float(np.mean(np.abs(np.diff(np.asarray(values, dtype=np.float64)))))
