"""Nearest-neighbour ranks and the Information Imbalance.

For a point ``i`` the rank of ``j`` under a variable set ``X`` is the 1-based
position of ``j`` when all other points are sorted by their distance from
``i``. The imbalance from ``X`` to ``Y`` is

    Delta(X -> Y) = (2 / N) * mean_i  r^Y(i, nn_X(i))

where ``nn_X(i)`` is the rank-1 neighbour of ``i`` under ``X``. Values near
``2/N`` mean ``X`` fully determines the neighbourhoods of ``Y``; values near
1 mean it carries no information about them.

Distances are Euclidean over standardized columns. Ordering uses squared
distances accumulated column by column; ties are broken by ascending point
index so every rank is unique and reproducible.
"""

from __future__ import annotations

import warnings
from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .errors import DataError
from .ingest import AlignedPanel

TIE_POLICY = "ascending-index"
# warn when more than this fraction of rows has several rank-1 candidates
TIE_WARNING_FRACTION = 0.01


@dataclass(frozen=True)
class RankMatrix:
    """Neighbour ordering of every point; row ``i`` excludes ``i`` itself."""

    n: int
    neighbor_order: np.ndarray
    tie_policy: str = TIE_POLICY

    def rank(self, i: int, j: int) -> int:
        if i == j:
            raise ValueError("a point has no rank with respect to itself")
        return int(np.flatnonzero(self.neighbor_order[i] == j)[0]) + 1

    def ranks(self) -> np.ndarray:
        """Dense ``n x n`` rank array with zeros on the diagonal."""
        out = np.zeros((self.n, self.n), dtype=np.int64)
        rows = np.repeat(np.arange(self.n), self.n - 1)
        out[rows, self.neighbor_order.ravel()] = np.tile(np.arange(1, self.n), self.n)
        return out


@dataclass(frozen=True)
class ImbalanceResult:
    forward: float
    backward: float
    n: int
    x_columns: tuple[str, ...]
    y_columns: tuple[str, ...]

    def to_dict(self) -> dict:
        return {
            "x_columns": list(self.x_columns),
            "y_columns": list(self.y_columns),
            "forward": self.forward,
            "backward": self.backward,
            "n": self.n,
        }


def squared_distances(points: np.ndarray) -> np.ndarray:
    """Pairwise squared Euclidean distances, self-distances set to +inf.

    Accumulates one column at a time so memory stays ``O(N^2)`` whatever the
    number of columns.
    """
    pts = np.asarray(points, dtype=np.float64)
    if pts.ndim == 1:
        pts = pts[:, None]
    n = pts.shape[0]
    d2 = np.zeros((n, n))
    for col in pts.T:
        diff = col[:, None] - col[None, :]
        d2 += diff * diff
    np.fill_diagonal(d2, np.inf)
    return d2


def _check_points(points: np.ndarray) -> np.ndarray:
    pts = np.asarray(points, dtype=np.float64)
    if pts.ndim == 1:
        pts = pts[:, None]
    if pts.shape[0] < 3:
        raise DataError("information imbalance needs at least 3 points")
    if pts.shape[1] == 0:
        raise DataError("empty column subset")
    return pts


def nearest_neighbors(d2: np.ndarray) -> np.ndarray:
    """Rank-1 neighbour of every row; ``argmin`` already returns the lowest index on ties."""
    return np.argmin(d2, axis=1)


def tied_nearest_fraction(d2: np.ndarray) -> float:
    """Fraction of rows whose minimum distance is attained by more than one point."""
    mins = d2.min(axis=1)
    return float(np.mean((d2 == mins[:, None]).sum(axis=1) > 1))


def ranks_of(d2: np.ndarray, targets: np.ndarray) -> np.ndarray:
    """Rank of ``targets[i]`` in row ``i`` of ``d2`` under the index tie-break."""
    n = d2.shape[0]
    rows = np.arange(n)
    ref = d2[rows, targets][:, None]
    closer = (d2 < ref).sum(axis=1)
    tied_before = ((d2 == ref) & (rows[None, :] < targets[:, None])).sum(axis=1)
    return 1 + closer + tied_before


def imbalance_value(rank_sum: int, n: int) -> float:
    """``(2/N) * mean rank`` from the exact integer rank sum; a single rounding."""
    return (2 * int(rank_sum)) / (n * n)


def _one_way(d2_from: np.ndarray, d2_to: np.ndarray) -> float:
    nn = nearest_neighbors(d2_from)
    return imbalance_value(ranks_of(d2_to, nn).sum(), d2_from.shape[0])


def _warn_ties(d2: np.ndarray, label: str) -> None:
    frac = tied_nearest_fraction(d2)
    if frac > TIE_WARNING_FRACTION:
        warnings.warn(
            f"{frac:.1%} of points have tied nearest neighbours under {label}; "
            f"ties broken by {TIE_POLICY}",
            RuntimeWarning,
            stacklevel=3,
        )


def imbalance_arrays(x: np.ndarray, y: np.ndarray) -> tuple[float, float]:
    """Forward and backward imbalance between two point clouds with equal row count."""
    x = _check_points(x)
    y = _check_points(y)
    if x.shape[0] != y.shape[0]:
        raise DataError("x and y must have the same number of rows")
    dx = squared_distances(x)
    dy = squared_distances(y)
    _warn_ties(dx, "x")
    _warn_ties(dy, "y")
    return _one_way(dx, dy), _one_way(dy, dx)


def rank_matrix(panel: AlignedPanel, columns: Sequence[str]) -> RankMatrix:
    """Full neighbour ordering under the standardized ``columns`` of ``panel``."""
    pts = _check_points(panel.matrix(columns))
    d2 = squared_distances(pts)
    # stable sort keeps ascending index among equal distances; self (+inf) lands last
    order = np.argsort(d2, axis=1, kind="stable")[:, :-1]
    return RankMatrix(n=pts.shape[0], neighbor_order=order)


def information_imbalance(panel: AlignedPanel, x: Sequence[str], y: Sequence[str]) -> ImbalanceResult:
    if isinstance(x, str):
        x = [x]
    if isinstance(y, str):
        y = [y]
    fwd, bwd = imbalance_arrays(panel.matrix(x), panel.matrix(y))
    return ImbalanceResult(fwd, bwd, panel.n, tuple(x), tuple(y))


def imbalance_plane(panel: AlignedPanel, candidates: Sequence[Sequence[str]],
                    target: Sequence[str]) -> list[ImbalanceResult]:
    """One (forward, backward) point per candidate subset, input order preserved."""
    if isinstance(target, str):
        target = [target]
    if not candidates:
        return []
    y = _check_points(panel.matrix(target))
    dy = squared_distances(y)
    _warn_ties(dy, "target")
    out = []
    for cand in candidates:
        if isinstance(cand, str):
            cand = [cand]
        dx = squared_distances(_check_points(panel.matrix(cand)))
        _warn_ties(dx, ",".join(cand))
        out.append(ImbalanceResult(_one_way(dx, dy), _one_way(dy, dx), panel.n, tuple(cand), tuple(target)))
    return out
