import math

import numpy as np
import pytest

from infoimb.errors import DataError
from infoimb.imbalance import information_imbalance
from infoimb.ingest import Frequency, pearson
from infoimb.synth import (REGIMES, TEMPORAL, SynthSpec, documented_moments, generate, generate_series)

IID = [r for r in REGIMES if r not in TEMPORAL]


def test_same_seed_same_panel():
    a = generate(SynthSpec("independent_noise", n=2000, seed=7))
    b = generate(SynthSpec("independent_noise", n=2000, seed=7))
    assert np.array_equal(a.data, b.data) and np.array_equal(a.grid, b.grid)


@pytest.mark.parametrize("regime", REGIMES)
def test_every_regime_generates(regime):
    panel = generate(SynthSpec(regime, n=60, seed=1, n_noise=2))
    assert panel.n == 60
    assert panel.target_name == panel.names[0]
    series = generate_series(SynthSpec(regime, n=60, seed=1, n_noise=2))
    assert [s.name for s in series] == list(panel.names)
    assert all(s.frequency is Frequency.DAILY for s in series)
    assert np.allclose(np.column_stack([s.values for s in series]), panel.raw_matrix())


def test_linear_noise_limit():
    exact = generate(SynthSpec("linear_noise", n=500, seed=3, sigma=0.0))
    assert pearson(exact, "x", "y") == pytest.approx(1.0, abs=1e-12)
    assert information_imbalance(exact, ["x"], ["y"]).forward == 2 / 500
    tiny = generate(SynthSpec("linear_noise", n=500, seed=3, sigma=1e-9))
    assert information_imbalance(tiny, ["x"], ["y"]).forward == pytest.approx(2 / 500, abs=1e-12)


def test_multivariate_sum_needs_both():
    panel = generate(SynthSpec("multivariate_sum", n=1000, seed=0))
    both = information_imbalance(panel, ["x1", "x2"], ["y"]).forward
    single = min(information_imbalance(panel, [c], ["y"]).forward for c in ("x1", "x2"))
    assert both < single - 0.2


@pytest.mark.parametrize("regime", IID)
def test_documented_moments(regime):
    spec = SynthSpec(regime, n=4000, seed=11, n_noise=2, d_noise=4)
    names = generate(spec).names
    raw = generate(spec).raw_matrix()
    tol = 5 / math.sqrt(spec.n)
    moments = documented_moments(spec)
    assert set(moments) == set(names)
    for j, name in enumerate(names):
        mean, std = moments[name]
        assert abs(raw[:, j].mean() - mean) < tol
        assert abs(raw[:, j].std(ddof=1) - std) < tol


def test_temporal_regimes_document_no_moments():
    for regime in TEMPORAL:
        assert documented_moments(SynthSpec(regime)) == {}


@pytest.mark.parametrize("regime", IID)
def test_seed_isolation(regime):
    n = 3000
    a = generate(SynthSpec(regime, n=n, seed=1, n_noise=2, d_noise=4))
    b = generate(SynthSpec(regime, n=n, seed=2, n_noise=2, d_noise=4))
    for name in a.names:
        r = np.corrcoef(a.column(name), b.column(name))[0, 1]
        assert abs(r) < 3 / math.sqrt(n)


def test_ar1_autocorrelation():
    y = generate(SynthSpec("ar1", n=5000, seed=0, phi=0.8)).column("y")
    assert np.corrcoef(y[1:], y[:-1])[0, 1] == pytest.approx(0.8, abs=0.03)


def test_weekly_driver_layout():
    panel = generate(SynthSpec("weekly_driver", n=120, seed=0, n_noise=3))
    assert panel.names == ("y", "driver", "n1", "n2", "n3")
    assert pearson(panel, "driver", "y") != pytest.approx(0.0, abs=1e-6)


@pytest.mark.parametrize("kwargs", [
    {"regime": "spiral"}, {"regime": "ar1", "n": 5}, {"regime": "ar1", "phi": 1.0},
    {"regime": "linear_noise", "sigma": -1.0}, {"regime": "informative_plus_noise", "d_inf": 0},
])
def test_invalid_specs(kwargs):
    with pytest.raises(DataError):
        SynthSpec(**kwargs)
