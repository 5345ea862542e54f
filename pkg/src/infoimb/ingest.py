"""CSV ingestion, calendar alignment, standardization and descriptive statistics.

A CSV file holds a header row whose first column is ``date`` (ISO-8601,
``YYYY-MM-DD``) followed by one or more numeric value columns. Every value
column becomes one :class:`TimeSeries`. Empty cells mark missing entries;
leading and trailing blanks simply trim a column's span, interior blanks are
rejected unless ``allow_missing`` is set.
"""

from __future__ import annotations

import csv
import datetime as dt
import math
from dataclasses import dataclass, field
from enum import Enum
from pathlib import Path
from typing import Iterable, Mapping, Sequence

import numpy as np
import pandas as pd

from .errors import AlignmentError, DataError, LoadError


class Frequency(str, Enum):
    DAILY = "daily"
    WEEKLY = "weekly"
    BIWEEKLY = "biweekly"
    MONTHLY = "monthly"
    QUARTERLY = "quarterly"

    @property
    def nominal_days(self) -> float:
        return _NOMINAL_DAYS[self]

    @property
    def rank(self) -> int:
        """Position from finest (0) to coarsest."""
        return list(Frequency).index(self)

    def __str__(self) -> str:
        return self.value


_NOMINAL_DAYS = {
    Frequency.DAILY: 1.0,
    Frequency.WEEKLY: 7.0,
    Frequency.BIWEEKLY: 14.0,
    Frequency.MONTHLY: 30.4375,
    Frequency.QUARTERLY: 91.3125,
}

# upper edge of median spacing (days) for each class; anything above is quarterly
_INFERENCE_TABLE = (
    (1.6, Frequency.DAILY),
    (9.0, Frequency.WEEKLY),
    (18.0, Frequency.BIWEEKLY),
    (45.0, Frequency.MONTHLY),
)
_FREQUENCY_TOLERANCE = 0.4


def infer_frequency(timestamps: np.ndarray) -> Frequency:
    """Classify a date vector by the median spacing between observations."""
    spacing = median_spacing_days(timestamps)
    for edge, freq in _INFERENCE_TABLE:
        if spacing <= edge:
            return freq
    return Frequency.QUARTERLY


def median_spacing_days(timestamps: np.ndarray) -> float:
    ts = np.asarray(timestamps, dtype="datetime64[D]")
    if ts.size < 2:
        raise DataError("at least two timestamps are needed to measure spacing")
    return float(np.median(np.diff(ts).astype(np.int64)))


def as_frequency(value: Frequency | str) -> Frequency:
    try:
        return Frequency(value)
    except ValueError:
        raise DataError(f"unknown frequency {value!r}") from None


@dataclass(frozen=True)
class TimeSeries:
    """Timestamped scalar observations at a declared native frequency."""

    name: str
    timestamps: np.ndarray
    values: np.ndarray
    frequency: Frequency

    def __post_init__(self):
        ts = np.asarray(self.timestamps, dtype="datetime64[D]")
        vals = np.asarray(self.values, dtype=np.float64)
        object.__setattr__(self, "timestamps", ts)
        object.__setattr__(self, "values", vals)
        object.__setattr__(self, "frequency", as_frequency(self.frequency))
        ts.flags.writeable = False
        vals.flags.writeable = False
        if ts.ndim != 1 or vals.shape != ts.shape:
            raise DataError(f"{self.name}: timestamps and values must be 1-D of equal length")
        if ts.size == 0:
            raise DataError(f"{self.name}: empty series")
        if not np.all(np.isfinite(vals)):
            raise DataError(f"{self.name}: non-finite values")
        if ts.size > 1:
            steps = np.diff(ts).astype(np.int64)
            if np.any(steps == 0):
                raise DataError(f"{self.name}: duplicate timestamp")
            if np.any(steps < 0):
                raise DataError(f"{self.name}: timestamps not increasing")
            check_frequency(ts, self.frequency, self.name)

    def __len__(self) -> int:
        return self.values.size

    @property
    def first(self) -> np.datetime64:
        return self.timestamps[0]

    @property
    def last(self) -> np.datetime64:
        return self.timestamps[-1]


def check_frequency(timestamps: np.ndarray, frequency: Frequency, name: str = "series") -> None:
    spacing = median_spacing_days(timestamps)
    nominal = frequency.nominal_days
    if abs(spacing - nominal) > _FREQUENCY_TOLERANCE * nominal:
        raise DataError(
            f"{name}: declared frequency {frequency} inconsistent with "
            f"median spacing of {spacing:g} days"
        )


@dataclass
class IngestOptions:
    """Options for :func:`load_panel`.

    ``frequency`` is either one frequency applied to every column or a
    mapping from column name to frequency; columns without an entry get their
    frequency inferred.
    """

    frequency: Frequency | str | Mapping[str, Frequency | str] | None = None
    allow_missing: bool = False

    def frequency_for(self, name: str) -> Frequency | None:
        if self.frequency is None:
            return None
        if isinstance(self.frequency, Mapping):
            value = self.frequency.get(name)
            return None if value is None else as_frequency(value)
        return as_frequency(self.frequency)


def _parse_date(text: str, path: Path, row: int) -> np.datetime64:
    try:
        return np.datetime64(dt.date.fromisoformat(text.strip()), "D")
    except ValueError:
        raise LoadError(f"{path}: row {row}: malformed date {text!r}") from None


def _parse_value(text: str, path: Path, row: int, column: str) -> float | None:
    text = text.strip()
    if not text:
        return None
    try:
        value = float(text)
    except ValueError:
        raise LoadError(f"{path}: row {row}: non-numeric cell {text!r} in column {column!r}") from None
    if not math.isfinite(value):
        raise LoadError(f"{path}: row {row}: non-finite cell {text!r} in column {column!r}")
    return value


def read_csv(path: str | Path, options: IngestOptions | None = None) -> list[TimeSeries]:
    """Parse one CSV file into one series per value column."""
    path = Path(path)
    options = options or IngestOptions()
    with open(path, newline="", encoding="utf-8") as fh:
        rows = list(csv.reader(fh))
    if not rows:
        raise LoadError(f"{path}: empty file")
    header = [h.strip() for h in rows[0]]
    if len(header) < 2 or header[0].lower() != "date":
        raise LoadError(f"{path}: header must start with 'date' followed by value columns")
    columns = header[1:]
    if len(set(columns)) != len(columns):
        raise LoadError(f"{path}: duplicate column names in header")

    dates: list[np.datetime64] = []
    cells: list[list[float | None]] = []
    for lineno, row in enumerate(rows[1:], start=2):
        if not row or all(not c.strip() for c in row):
            continue
        if len(row) != len(header):
            raise LoadError(f"{path}: row {lineno}: expected {len(header)} cells, got {len(row)}")
        date = _parse_date(row[0], path, lineno)
        if dates and date == dates[-1]:
            raise LoadError(f"{path}: row {lineno}: duplicate timestamp {date}")
        if dates and date < dates[-1]:
            raise LoadError(f"{path}: row {lineno}: timestamps not increasing")
        dates.append(date)
        cells.append([_parse_value(c, path, lineno, col) for c, col in zip(row[1:], columns)])

    if not dates:
        raise LoadError(f"{path}: no data rows")
    # sorted-ness was checked row by row, so duplicates anywhere are caught
    grid = np.array(dates, dtype="datetime64[D]")
    out = []
    for j, name in enumerate(columns):
        col = [r[j] for r in cells]
        present = np.array([v is not None for v in col])
        if not present.any():
            raise LoadError(f"{path}: column {name!r} is empty")
        lo, hi = np.flatnonzero(present)[[0, -1]]
        if not options.allow_missing and not present[lo : hi + 1].all():
            bad = lo + int(np.argmin(present[lo : hi + 1]))
            raise LoadError(f"{path}: row {bad + 2}: missing interior cell in column {name!r}")
        ts = grid[present]
        vals = np.array([v for v in col if v is not None], dtype=np.float64)
        freq = options.frequency_for(name)
        if freq is None:
            if ts.size < 2:
                raise LoadError(f"{path}: column {name!r} has a single observation; declare its frequency")
            freq = infer_frequency(ts)
        try:
            out.append(TimeSeries(name, ts, vals, freq))
        except DataError as exc:
            raise LoadError(f"{path}: {exc}") from None
    return out


def load_panel(paths: Iterable[str | Path], config: IngestOptions | None = None) -> list[TimeSeries]:
    """Load every value column of every CSV file; names must be unique across files."""
    series: list[TimeSeries] = []
    seen: dict[str, Path] = {}
    for path in paths:
        for s in read_csv(path, config):
            if s.name in seen:
                raise LoadError(f"{path}: column {s.name!r} already loaded from {seen[s.name]}")
            seen[s.name] = Path(path)
            series.append(s)
    if not series:
        raise LoadError("no input files")
    return series


def write_csv(series: Sequence[TimeSeries], path: str | Path) -> None:
    """Write series in the CSV contract; rows are the union of dates, blanks where absent."""
    dates = np.unique(np.concatenate([s.timestamps for s in series]))
    frame = pd.DataFrame(index=pd.Index(dates.astype(str), name="date"))
    for s in series:
        frame[s.name] = pd.Series(s.values, index=s.timestamps.astype(str))
    with open(path, "w", newline="", encoding="utf-8") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(["date", *frame.columns])
        for date, row in zip(frame.index, frame.to_numpy()):
            writer.writerow([date, *("" if np.isnan(v) else repr(float(v)) for v in row)])


@dataclass(frozen=True)
class AlignedPanel:
    """N x D standardized matrix on a shared date grid.

    ``data`` holds z-scored columns; ``means`` and ``stds`` are the sample
    (ddof=1) moments used to standardize them, so ``raw`` recovers the
    original units.
    """

    grid: np.ndarray
    names: tuple[str, ...]
    data: np.ndarray
    target_name: str
    means: np.ndarray
    stds: np.ndarray
    frequency: Frequency | None = None
    _index: dict = field(init=False, repr=False, compare=False)

    def __post_init__(self):
        object.__setattr__(self, "names", tuple(self.names))
        object.__setattr__(self, "_index", {n: i for i, n in enumerate(self.names)})
        for arr in (self.grid, self.data, self.means, self.stds):
            arr.flags.writeable = False
        if len(self._index) != len(self.names):
            raise DataError("duplicate column names in panel")
        if self.data.shape != (self.grid.size, len(self.names)):
            raise DataError("panel data shape does not match grid and names")
        if self.target_name not in self._index:
            raise DataError(f"target {self.target_name!r} is not a panel column")

    @classmethod
    def from_raw(cls, grid, names: Sequence[str], raw: np.ndarray, target_name: str | None = None,
                 frequency: Frequency | None = None) -> "AlignedPanel":
        raw = np.asarray(raw, dtype=np.float64)
        names = tuple(names)
        if raw.ndim != 2 or raw.shape[1] != len(names):
            raise DataError("raw matrix must be N x D with one name per column")
        if raw.shape[0] < 2:
            raise AlignmentError("panel needs at least two rows")
        for j, name in enumerate(names):
            if np.ptp(raw[:, j]) == 0:
                raise AlignmentError(f"zero variance: {name}")
        # per column on contiguous copies, so a column's moments do not depend on its position
        cols = [np.ascontiguousarray(raw[:, j]) for j in range(raw.shape[1])]
        means = np.array([c.mean() for c in cols])
        stds = np.array([c.std(ddof=1) for c in cols])
        data = (raw - means) / stds
        return cls(
            grid=np.asarray(grid, dtype="datetime64[D]").copy(),
            names=names,
            data=data,
            target_name=names[0] if target_name is None else target_name,
            means=means,
            stds=stds,
            frequency=frequency,
        )

    @property
    def n(self) -> int:
        return self.grid.size

    def index_of(self, name: str) -> int:
        try:
            return self._index[name]
        except KeyError:
            raise DataError(f"unknown column {name!r}") from None

    def column(self, name: str) -> np.ndarray:
        return self.data[:, self.index_of(name)]

    def matrix(self, names: Sequence[str]) -> np.ndarray:
        if isinstance(names, str):
            names = [names]
        if len(names) == 0:
            raise DataError("empty column subset")
        return self.data[:, [self.index_of(n) for n in names]]

    def raw(self, name: str) -> np.ndarray:
        j = self.index_of(name)
        return self.data[:, j] * self.stds[j] + self.means[j]

    def raw_matrix(self) -> np.ndarray:
        return self.data * self.stds + self.means

    def to_series(self) -> list[TimeSeries]:
        freq = self.frequency or infer_frequency(self.grid)
        return [TimeSeries(n, self.grid, self.raw(n), freq) for n in self.names]

    def to_frame(self) -> pd.DataFrame:
        """Raw-scale values indexed by date."""
        return pd.DataFrame(self.raw_matrix(), index=pd.DatetimeIndex(self.grid, name="date"),
                            columns=list(self.names))

    def with_target(self, name: str) -> "AlignedPanel":
        self.index_of(name)
        return AlignedPanel(self.grid, self.names, self.data, name, self.means, self.stds, self.frequency)


def align(series: Sequence[TimeSeries], grid_frequency: Frequency | str,
          target: str | None = None) -> AlignedPanel:
    """Intersect the series' calendars and z-score every column.

    All series must already be at ``grid_frequency``; mixed-frequency input
    goes through :func:`infoimb.resample.resample_panel` first. ``target``
    defaults to the first series.
    """
    grid_frequency = as_frequency(grid_frequency)
    if not series:
        raise AlignmentError("no series to align")
    for s in series:
        if s.frequency is not grid_frequency:
            raise AlignmentError(f"{s.name}: frequency {s.frequency} differs from grid {grid_frequency}")
    grid = series[0].timestamps
    for s in series[1:]:
        grid = np.intersect1d(grid, s.timestamps, assume_unique=True)
    if grid.size == 0:
        raise AlignmentError("empty intersection of series dates")
    raw = np.empty((grid.size, len(series)))
    for j, s in enumerate(series):
        raw[:, j] = s.values[np.searchsorted(s.timestamps, grid)]
    return AlignedPanel.from_raw(grid, [s.name for s in series], raw, target, grid_frequency)


def describe(panel: AlignedPanel) -> pd.DataFrame:
    """Per-column summary on the original scale (sample std, linear quantiles)."""
    if panel.n == 0:
        raise DataError("empty panel")
    raw = panel.raw_matrix()
    stats = {
        "mean": raw.mean(axis=0),
        "std": raw.std(axis=0, ddof=1),
        "min": raw.min(axis=0),
        "25%": np.quantile(raw, 0.25, axis=0, method="linear"),
        "50%": np.quantile(raw, 0.50, axis=0, method="linear"),
        "75%": np.quantile(raw, 0.75, axis=0, method="linear"),
        "max": raw.max(axis=0),
    }
    return pd.DataFrame(stats, index=pd.Index(panel.names, name="column"))


def pearson(panel: AlignedPanel, a: str, b: str, returns: bool = False) -> float:
    """Sample Pearson correlation between two columns.

    Levels by default; ``returns=True`` correlates one-period arithmetic
    returns of the raw series instead.
    """
    if returns:
        x, y = panel.raw(a), panel.raw(b)
        if np.any(x[:-1] == 0) or np.any(y[:-1] == 0):
            raise DataError("returns undefined for zero levels")
        x, y = np.diff(x) / x[:-1], np.diff(y) / y[:-1]
    else:
        x, y = panel.column(a), panel.column(b)
    x = x - x.mean()
    y = y - y.mean()
    denom = math.sqrt(float(x @ x) * float(y @ y))
    if denom == 0:
        raise DataError("correlation undefined for a constant column")
    return float(np.clip((x @ y) / denom, -1.0, 1.0))
