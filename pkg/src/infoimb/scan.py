"""Greedy selection repeated across sampling frequencies and target lags."""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Sequence

import numpy as np

from .errors import DataError
from .greedy import EPSILON, GreedyTrace, greedy_select
from .ingest import AlignedPanel, Frequency, TimeSeries, as_frequency
from .resample import resample_panel

LAGS = (0, 1)
SCAN_STEPS = (1, 2, 3)


def lag_name(target: str) -> str:
    return f"{target}_lag1"


def shift_panel(panel: AlignedPanel, delta_t: int, target: str | None = None) -> AlignedPanel:
    """Pair predictors at row ``t`` with the target at row ``t + delta_t``.

    For ``delta_t = 1`` the last predictor row is dropped, the grid keeps the
    target's dates, and the target at ``t`` is added as ``<target>_lag1``.
    Columns are re-standardized over the remaining rows.
    """
    if delta_t not in LAGS:
        raise DataError(f"delta_t must be one of {LAGS}, got {delta_t}")
    target = target or panel.target_name
    if delta_t == 0:
        return panel if target == panel.target_name else panel.with_target(target)
    if panel.n < 4:
        raise DataError("panel too short to shift")
    raw = panel.raw_matrix()
    j = panel.index_of(target)
    if lag_name(target) in panel.names:
        raise DataError(f"column {lag_name(target)!r} already exists")
    shifted = raw[:-1].copy()
    shifted[:, j] = raw[1:, j]
    names = list(panel.names) + [lag_name(target)]
    shifted = np.column_stack([shifted, raw[:-1, j]])
    return AlignedPanel.from_raw(panel.grid[1:], names, shifted, target, panel.frequency)


def candidate_pool(panel: AlignedPanel) -> list[str]:
    """Every non-target column; the lagged target is a column only after a shift."""
    return [n for n in panel.names if n != panel.target_name]


@dataclass
class ScanReport:
    target: str
    frequencies: list[Frequency]
    lags: list[int]
    cells: dict[tuple[Frequency, int], GreedyTrace] = field(default_factory=dict)
    panel_sizes: dict[Frequency, int] = field(default_factory=dict)
    best_frequency: dict[int, dict[int, Frequency]] = field(default_factory=dict)

    def value_at(self, frequency: Frequency, delta_t: int, k: int) -> float | None:
        """Forward imbalance after ``k`` steps; a trace that stopped early keeps its last value."""
        steps = self.cells[(frequency, delta_t)].steps
        if not steps:
            return None
        return steps[min(k, len(steps)) - 1].forward

    def to_dict(self) -> dict:
        return {
            "target": self.target,
            "frequencies": [f.value for f in self.frequencies],
            "lags": list(self.lags),
            "cells": [
                {"frequency": f.value, "delta_t": dt, "n": self.panel_sizes[f], **self.cells[(f, dt)].to_dict()}
                for f in self.frequencies for dt in self.lags
            ],
            "best_frequency": {
                str(dt): {str(k): f.value for k, f in per_k.items()} for dt, per_k in self.best_frequency.items()
            },
        }

    def curve_rows(self) -> list[dict]:
        rows = []
        for f in self.frequencies:
            for dt in self.lags:
                for k, step in enumerate(self.cells[(f, dt)].steps, start=1):
                    rows.append({"frequency": f.value, "delta_t": dt, "k": k, "column": step.column,
                                 "forward": step.forward, "backward": step.backward})
        return rows


def _best(report: ScanReport) -> None:
    for dt in report.lags:
        per_k = {}
        for k in SCAN_STEPS:
            best = None
            for f in report.frequencies:  # finest first; strict < keeps the finer one on ties
                v = report.value_at(f, dt, k)
                if v is not None and (best is None or v < best[0]):
                    best = (v, f)
            if best is not None:
                per_k[k] = best[1]
        report.best_frequency[dt] = per_k


def scan(series: Sequence[TimeSeries], frequencies: Sequence[Frequency | str], lags: Sequence[int],
         target: str, max_k: int = 3, epsilon: float = EPSILON) -> ScanReport:
    """Resample the panel to each frequency and run greedy selection for each lag.

    At ``delta_t = 1`` the lagged target joins the candidate pool.
    """
    freqs = sorted({as_frequency(f) for f in frequencies}, key=lambda f: f.rank)
    if not freqs:
        raise DataError("no frequencies to scan")
    lags = sorted(set(int(l) for l in lags))
    if not lags:
        raise DataError("no lags to scan")
    for dt in lags:
        if dt not in LAGS:
            raise DataError(f"delta_t must be one of {LAGS}, got {dt}")
    if target not in {s.name for s in series}:
        raise DataError(f"target {target!r} not among the series")
    report = ScanReport(target=target, frequencies=freqs, lags=lags)
    for f in freqs:
        panel = resample_panel(series, f, target)
        report.panel_sizes[f] = panel.n
        for dt in lags:
            shifted = shift_panel(panel, dt)
            report.cells[(f, dt)] = greedy_select(shifted, candidate_pool(shifted), target, max_k, epsilon)
    _best(report)
    return report
