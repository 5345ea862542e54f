import numpy as np
import pytest

from conftest import make_panel
from infoimb.errors import DataError, NumericalError
from infoimb import forecast as fc
from infoimb.greedy import greedy_select
from infoimb.ingest import AlignedPanel
from infoimb.scan import lag_name, shift_panel
from infoimb.synth import SynthSpec, _raw, business_days, generate


def _informative(seed, n=200, d_noise=6):
    return generate(SynthSpec("informative_plus_noise", n=n, seed=seed, d_noise=d_noise))


def test_contiguous_folds_partition():
    folds = fc.contiguous_folds(23, 5)
    assert np.array_equal(np.concatenate(folds), np.arange(23))
    assert all(np.all(np.diff(f) == 1) for f in folds)
    assert max(map(len, folds)) - min(map(len, folds)) <= 1
    with pytest.raises(DataError):
        fc.contiguous_folds(9, 5)


def test_target_copy_leakage_sanity(rng):
    y = rng.uniform(size=150)
    panel = make_panel({"y": y, "copy": y.copy(), "noise": rng.normal(size=150)})
    report = fc.run_forecast(panel, fc.ForecastConfig(mode="selected", k=1))
    assert report.runs[0].predictors == ["copy"]
    assert report.mse_mean < 1e-3


def test_held_out_targets_never_used(rng):
    panel = _informative(0, n=100, d_noise=2)
    config = fc.ForecastConfig()
    base = fc.cross_validate(panel, ["x1", "x2"], config)
    raw = panel.raw_matrix().copy()
    held = fc.contiguous_folds(panel.n, config.cv_folds)[2]
    raw[held, 0] += 50.0 * rng.normal(size=held.size)
    poisoned = AlignedPanel.from_raw(panel.grid, panel.names, raw, "y", panel.frequency)
    again = fc.cross_validate(poisoned, ["x1", "x2"], config)
    assert np.allclose(again.predicted[held], base.predicted[held], rtol=0, atol=1e-9)
    assert np.array_equal(again.dates, panel.grid)


def test_one_step_predictor_row_precedes_target(rng):
    n = 40
    panel = make_panel({"y": np.sin(np.arange(n) / 3.0) + 0.01 * rng.normal(size=n), "x": rng.normal(size=n)})
    shifted = shift_panel(panel, 1)
    run = fc.cross_validate(shifted, [lag_name("y")], fc.ForecastConfig(delta_t=1))
    # each predicted date is the target date; its lag value is the previous row's target
    assert np.array_equal(run.dates, panel.grid[1:])
    assert np.allclose(shifted.raw(lag_name("y"))[1:], panel.raw("y")[1:-1])


def test_ar1_one_step_r_squared():
    # one-step R^2 of an AR(1) is phi^2; the GP noise is the innovation variance 1 - phi^2
    # in standardized units (at the 1e-3 default the ML length scale collapses and R^2 drops)
    phi = 0.95
    config = fc.ForecastConfig(delta_t=1, sigma_n_sq=1 - phi ** 2)
    scores = []
    for seed in range(5):
        panel = generate(SynthSpec("ar1", n=500, seed=seed, phi=phi))
        trace = greedy_select(shift_panel(panel, 1), [lag_name("y")], "y", max_k=1)
        path = fc.predict_path(panel, config, trace)
        scores.append(fc.r_squared(path.runs[0]))
    assert np.mean(scores) > 0.8 and sum(s > 0.8 for s in scores) >= 4
    rows = path.path_rows()
    assert len(rows) == 499 and set(rows[0]) == {"date", "realized", "predicted", "fold", "replication"}


def test_predict_path_requires_predictors():
    panel = _informative(1, n=60, d_noise=1)
    with pytest.raises(DataError, match="empty predictor set"):
        fc.predict_path(panel, fc.ForecastConfig(), None)


def test_random_mode_reproducible():
    panel = _informative(2, n=120)
    cfg = fc.ForecastConfig(mode="random", k=2, replications=3, seed=9)
    a = fc.run_forecast(panel, cfg).to_dict()
    assert a == fc.run_forecast(panel, cfg).to_dict()
    other = fc.run_forecast(panel, fc.ForecastConfig(mode="random", k=2, replications=3, seed=10)).to_dict()
    assert [r["predictors"] for r in a["runs"]] != [r["predictors"] for r in other["runs"]]


def test_column_order_invariance():
    names, raw = _raw(SynthSpec("informative_plus_noise", n=120, seed=3, d_noise=3))
    grid = business_days(120)
    panel = AlignedPanel.from_raw(grid, names, raw, "y")
    perm = [0] + list(range(len(names) - 1, 0, -1))
    permuted = AlignedPanel.from_raw(grid, [names[j] for j in perm], raw[:, perm], "y")
    for mode in fc.MODES:
        cfg = fc.ForecastConfig(mode=mode, k=2, replications=2, seed=1)
        assert fc.run_forecast(panel, cfg).to_dict() == fc.run_forecast(permuted, cfg).to_dict()


def test_selected_beats_random_small():
    wins = 0
    for seed in range(3):
        panel = _informative(seed, n=200)
        reports = {r.mode: r for r in fc.compare_modes(panel, fc.ForecastConfig(k=3, replications=4, seed=seed))}
        wins += reports["selected"].mse_mean < reports["random"].mse_mean
        assert sorted(reports["selected"].runs[0].predictors) == ["x1", "x2", "x3"]
    assert wins == 3


def test_report_fields():
    report = fc.run_forecast(_informative(4, n=80, d_noise=2), fc.ForecastConfig(mode="all"))
    d = report.to_dict()
    assert d["scale"] == "standardized" and d["mode"] == "all" and d["delta_t"] == 0
    assert len(d["runs"][0]["fold_mse"]) == 5
    assert report.table_row()["mse_std"] == pytest.approx(np.std(report.fold_mse, ddof=1))


def test_failed_folds(monkeypatch):
    panel = _informative(5, n=60, d_noise=1)

    def boom(*args, **kwargs):
        raise fc.gp.GPFitError("forced")

    monkeypatch.setattr(fc.gp, "fit_optimized", boom)
    with pytest.raises(NumericalError, match="every cross-validation fold"):
        fc.cross_validate(panel, ["x1"], fc.ForecastConfig())


def test_config_validation():
    with pytest.raises(DataError):
        fc.ForecastConfig(mode="best")
    with pytest.raises(DataError):
        fc.ForecastConfig(delta_t=2)
    with pytest.raises(DataError):
        fc.ForecastConfig(k=0)
    panel = _informative(6, n=60, d_noise=1)
    with pytest.raises(DataError, match="cannot draw"):
        fc.run_forecast(panel, fc.ForecastConfig(mode="random", k=9))
