"""Rank-based Information Imbalance for selecting and resampling time-series predictors.

The modules build on one another: :mod:`ingest` loads CSV panels,
:mod:`imbalance` and :mod:`greedy` score and select predictors,
:mod:`gp` and :mod:`resample` move series between sampling frequencies,
:mod:`scan` repeats selection across frequencies and lags, and
:mod:`forecast` checks the chosen predictors with a cross-validated GP.
"""

from .errors import AlignmentError, DataError, GPFitError, InfoImbError, LoadError, NumericalError
from .forecast import ForecastConfig, ForecastReport, compare_modes, run_forecast
from .gp import GPFit, KernelConfig, fit, fit_optimized, log_marginal_likelihood
from .greedy import GreedyTrace, greedy_select
from .imbalance import ImbalanceResult, imbalance_arrays, imbalance_plane, information_imbalance
from .ingest import AlignedPanel, Frequency, IngestOptions, TimeSeries, align, load_panel, read_csv, write_csv
from .resample import aggregate, impute, resample_panel
from .scan import ScanReport, shift_panel
from .synth import SynthSpec, generate, generate_series

__version__ = "0.1.0"

__all__ = [
    "AlignedPanel", "AlignmentError", "DataError", "ForecastConfig", "ForecastReport", "Frequency",
    "GPFit", "GPFitError", "GreedyTrace", "ImbalanceResult", "InfoImbError", "IngestOptions",
    "KernelConfig", "LoadError", "NumericalError", "ScanReport", "SynthSpec", "TimeSeries",
    "aggregate", "align", "compare_modes", "fit", "fit_optimized", "generate", "generate_series",
    "greedy_select", "imbalance_arrays", "imbalance_plane", "impute", "information_imbalance",
    "load_panel", "log_marginal_likelihood", "read_csv", "resample_panel",
    "run_forecast", "shift_panel", "write_csv", "__version__",
]
