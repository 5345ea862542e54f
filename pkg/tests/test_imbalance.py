import warnings

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from hypothesis.extra.numpy import arrays

import oracles
from conftest import make_panel
from infoimb.errors import DataError
from infoimb.imbalance import (imbalance_arrays, imbalance_plane, information_imbalance, rank_matrix,
                               squared_distances)


def test_neighbor_order_three_points():
    panel = make_panel({"x": [0.0, 1.0, 3.0], "y": [1.0, 0.0, 2.0]})
    order = rank_matrix(panel, ["x"]).neighbor_order
    assert order[0].tolist() == [1, 2]
    assert order[2].tolist() == [1, 0]


def test_equidistant_neighbors_break_to_lower_index():
    panel = make_panel({"a": [0.0, 1.0, 0.0], "b": [0.0, 0.0, 1.0]})
    rm = rank_matrix(panel, ["a", "b"])
    assert rm.neighbor_order[0].tolist() == [1, 2]
    assert rm.rank(0, 1) == 1 and rm.rank(0, 2) == 2


def test_duplicate_pair_deterministic():
    x = np.array([0.0, 5.0, 2.0, 5.0, 9.0, 2.0])
    panel = make_panel({"x": x, "y": np.arange(6.0)})
    first = rank_matrix(panel, ["x"]).neighbor_order
    assert np.array_equal(first, rank_matrix(panel, ["x"]).neighbor_order)
    assert first[1, 0] == 3 and first[3, 0] == 1 and first[2, 0] == 5


def test_ranks_matrix_is_permutation(rng):
    panel = make_panel({"x": rng.normal(size=30), "y": rng.normal(size=30)})
    ranks = rank_matrix(panel, ["x", "y"]).ranks()
    for i in range(30):
        assert sorted(np.delete(ranks[i], i).tolist()) == list(range(1, 30))


@pytest.mark.parametrize("n", [3, 10, 57])
def test_identity_is_two_over_n(rng, n):
    panel = make_panel({"x": rng.normal(size=n), "z": rng.normal(size=n)})
    r = information_imbalance(panel, ["x"], ["x"])
    assert r.forward == 2 / n and r.backward == 2 / n


def test_identity_with_ties():
    x = np.array([1.0, 1.0, 2.0, 2.0, 3.0, 7.0])
    with warnings.catch_warnings():
        warnings.simplefilter("ignore", RuntimeWarning)
        fwd, bwd = imbalance_arrays(x, x)
    assert fwd == bwd == 2 / 6


def test_tie_warning():
    x = np.repeat(np.arange(10.0), 2)
    with pytest.warns(RuntimeWarning, match="tied nearest neighbours"):
        imbalance_arrays(x, np.arange(20.0))


def test_matches_full_sort_oracle(rng):
    for _ in range(40):
        n = int(rng.integers(3, 40))
        x = rng.normal(size=(n, int(rng.integers(1, 4))))
        y = rng.normal(size=(n, int(rng.integers(1, 3))))
        fwd, bwd = imbalance_arrays(x, y)
        assert fwd == oracles.imbalance(x, y)
        assert bwd == oracles.imbalance(y, x)


def test_matches_oracle_on_integer_grids(rng):
    # heavy ties exercise the index tie-break on both sides
    for _ in range(20):
        n = int(rng.integers(5, 30))
        x = rng.integers(0, 4, size=(n, 2)).astype(float)
        y = rng.integers(0, 3, size=n).astype(float)
        with warnings.catch_warnings():
            warnings.simplefilter("ignore", RuntimeWarning)
            fwd, bwd = imbalance_arrays(x, y)
        assert fwd == oracles.imbalance(x, y)
        assert bwd == oracles.imbalance(y, x)


def test_rank_matrix_matches_oracle(rng):
    x = rng.integers(0, 5, size=(25, 2)).astype(float)
    panel = make_panel({"a": x[:, 0], "b": x[:, 1]})
    order = rank_matrix(panel, ["a", "b"]).neighbor_order
    pts = panel.matrix(["a", "b"])
    for i in range(25):
        assert order[i].tolist() == oracles.neighbor_order(pts, i)


def test_quadratic_is_asymmetric():
    g = np.random.Generator(np.random.PCG64(0))
    x = g.uniform(-1, 1, 1000)
    y = x * x + 0.01 * g.standard_normal(1000)
    fwd, bwd = imbalance_arrays(x, y)
    assert fwd < 0.5
    assert bwd > fwd + 0.2


def test_plane_with_target_copy(rng):
    y = rng.normal(size=50)
    panel = make_panel({"y": y, "copy": y.copy(), "noise": rng.normal(size=50)})
    points = imbalance_plane(panel, [["noise"], ["copy"], ["y"]], ["y"])
    assert [p.x_columns for p in points] == [("noise",), ("copy",), ("y",)]
    assert (points[1].forward, points[1].backward) == (2 / 50, 2 / 50)
    assert (points[2].forward, points[2].backward) == (2 / 50, 2 / 50)
    assert imbalance_plane(panel, [], ["y"]) == []


def test_positive_affine_invariance(rng):
    x, y = rng.normal(size=200), rng.normal(size=200) + 0.3 * rng.normal(size=200)
    base = make_panel({"y": y, "x": x})
    moved = make_panel({"y": y, "x": 4.0 * x - 11.0})
    assert information_imbalance(base, ["x"], ["y"]).to_dict() == information_imbalance(moved, ["x"], ["y"]).to_dict()


def test_nonlinear_monotone_map_can_change_neighbours():
    # in one dimension the nearest neighbour is the closer of the two sorted neighbours,
    # and a convex increasing map can change which one that is
    x = np.array([0.0, 1.0, 1.8])
    assert rank_matrix(make_panel({"x": x}), ["x"]).neighbor_order[1, 0] == 2
    assert rank_matrix(make_panel({"x": np.exp(x)}), ["x"]).neighbor_order[1, 0] == 0


def test_errors():
    with pytest.raises(DataError, match="at least 3"):
        imbalance_arrays(np.arange(2.0), np.arange(2.0))
    with pytest.raises(DataError, match="same number of rows"):
        imbalance_arrays(np.arange(4.0), np.arange(5.0))


def test_squared_distances_diagonal(rng):
    d2 = squared_distances(rng.normal(size=(6, 3)))
    assert np.all(np.isinf(np.diag(d2)))
    assert np.allclose(d2, d2.T)


finite = st.floats(-1e3, 1e3, allow_nan=False, allow_infinity=False)


@settings(max_examples=60, deadline=None)
@given(st.integers(3, 25).flatmap(lambda n: st.tuples(arrays(float, n, elements=finite),
                                                      arrays(float, n, elements=finite))))
def test_bounds_and_oracle(pair):
    x, y = pair
    n = x.size
    with warnings.catch_warnings():
        warnings.simplefilter("ignore", RuntimeWarning)
        fwd, bwd = imbalance_arrays(x, y)
    for v in (fwd, bwd):
        assert 2 / n <= v <= 2 * (n - 1) / n
    assert fwd == oracles.imbalance(x, y)


@settings(max_examples=40, deadline=None)
@given(st.integers(0, 2**32 - 1), st.integers(4, 40))
def test_permutation_equivariance(seed, n):
    g = np.random.Generator(np.random.PCG64(seed))
    x, y = g.normal(size=(n, 2)), g.normal(size=n)
    perm = g.permutation(n)
    assert imbalance_arrays(x, y) == imbalance_arrays(x[perm], y[perm])


def test_independent_noise_near_one():
    vals = []
    for seed in range(10):
        g = np.random.Generator(np.random.PCG64(seed))
        vals.append(imbalance_arrays(g.uniform(size=1000), g.uniform(size=1000))[0])
    assert abs(np.mean(vals) - 1.0) < 0.1
