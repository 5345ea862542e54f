"""Forward greedy selection of the predictor set minimizing Delta(X -> target)."""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Sequence

import numpy as np

from .errors import DataError
from .imbalance import (
    _check_points,
    _one_way,
    _warn_ties,
    squared_distances,
)
from .ingest import AlignedPanel

MAX_K = 10
EPSILON = 0.01

STOP_MAX_K = "max_k"
STOP_GAIN = "relative_gain_below_epsilon"
STOP_EXHAUSTED = "pool_exhausted"


@dataclass(frozen=True)
class GreedyStep:
    column: str
    forward: float
    backward: float


@dataclass
class GreedyTrace:
    target: tuple[str, ...]
    candidate_pool: tuple[str, ...]
    steps: list[GreedyStep] = field(default_factory=list)
    stop_reason: str = STOP_MAX_K

    @property
    def selected(self) -> list[str]:
        return [s.column for s in self.steps]

    def to_dict(self) -> dict:
        return {
            "target": list(self.target),
            "candidate_pool": list(self.candidate_pool),
            "steps": [{"column": s.column, "forward": s.forward, "backward": s.backward} for s in self.steps],
            "stop_reason": self.stop_reason,
        }


def _column_d2(col: np.ndarray) -> np.ndarray:
    diff = col[:, None] - col[None, :]
    return diff * diff


def greedy_select(panel: AlignedPanel, candidates: Sequence[str], target: Sequence[str] | str | None = None,
                  max_k: int = MAX_K, epsilon: float = EPSILON, allow_target: bool = False) -> GreedyTrace:
    """Greedily grow the predictor set one column at a time.

    Each step appends the candidate whose addition gives the lowest forward
    imbalance towards ``target``; equal scores go to the lexicographically
    smallest name. Selection stops after ``max_k`` columns, when the pool runs
    out, or when the relative gain ``(prev - new) / prev`` of the best
    extension falls below ``epsilon``. A rejected extension is not recorded.
    """
    if target is None:
        target = [panel.target_name]
    elif isinstance(target, str):
        target = [target]
    target = tuple(target)
    if max_k < 1:
        raise DataError("max_k must be at least 1")
    pool = sorted(dict.fromkeys(candidates))
    if not pool:
        raise DataError("empty candidate pool")
    for name in pool:
        panel.index_of(name)
        if name in target and not allow_target:
            raise DataError(f"candidate {name!r} is a target column")

    dy = squared_distances(_check_points(panel.matrix(target)))
    _warn_ties(dy, "target")
    trace = GreedyTrace(target=target, candidate_pool=tuple(pool))
    current = np.zeros_like(dy)
    remaining = list(pool)
    prev = None
    while True:
        if len(trace.steps) >= max_k:
            trace.stop_reason = STOP_MAX_K
            break
        if not remaining:
            trace.stop_reason = STOP_EXHAUSTED
            break
        best = None
        for name in remaining:
            cand = current + _column_d2(panel.column(name))
            np.fill_diagonal(cand, np.inf)
            score = _one_way(cand, dy)
            if best is None or score < best[0]:
                best = (score, name, cand)
        score, name, cand = best
        if prev is not None and (prev - score) / prev < epsilon:
            trace.stop_reason = STOP_GAIN
            break
        _warn_ties(cand, name)
        trace.steps.append(GreedyStep(name, score, _one_way(dy, cand)))
        np.fill_diagonal(cand, 0.0)
        current = cand
        remaining.remove(name)
        prev = score
    return trace


def greedy_plane_points(trace: GreedyTrace) -> list[dict]:
    """Staircase rows (k, added column, forward, backward) for plotting."""
    return [
        {"k": k, "column": s.column, "forward": s.forward, "backward": s.backward}
        for k, s in enumerate(trace.steps, start=1)
    ]
