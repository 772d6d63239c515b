import math

import numpy as np
import pytest

import icrar
from icrar.simulate import VARIANCE_WARMUP, _variance_recursion

from _oracles import ar1_closed_form


def test_iid_draws_are_standard_normal_stream():
    rng = icrar.substream(1, 0)
    u = icrar.draw_innovations(icrar.InnovationSpec.iid(), 3, rng)
    expected = icrar.substream(1, 0).standard_normal(3)
    assert u.shape == (3,)
    assert np.array_equal(u, expected)


def test_garch_unconditional_variance_long_run():
    spec = icrar.InnovationSpec.garch11(0.05, 0.9, 0.001)
    assert spec.unconditional_variance == pytest.approx(0.02)
    u = icrar.draw_innovations(spec, 1_000_000, icrar.substream(2, 0))
    assert np.var(u) == pytest.approx(0.02, abs=0.002)


def test_garch_nonstationary_boundary_rejected():
    with pytest.raises(icrar.ParameterError):
        icrar.InnovationSpec.garch11(0.1, 0.9, 0.001)
    with pytest.raises(icrar.ParameterError):
        icrar.InnovationSpec.garch11(-0.05, 0.9, 0.001)
    with pytest.raises(icrar.ParameterError):
        icrar.InnovationSpec.arch4(0.3, 0.3, 0.3, 0.2, 0.2)
    with pytest.raises(icrar.ParameterError):
        icrar.InnovationSpec.garch11(0.05, 0.9, 0.0)


def test_conditional_variances_strictly_positive():
    for key in ("garch1", "garch2", "garch3", "arch4"):
        spec = icrar.INNOVATION_PRESETS[key]
        _, sig2 = _variance_recursion(spec, 5000, icrar.substream(3, 0))
        assert np.all(sig2 > 0.0)


def test_iid_lag_one_autocorrelation_near_zero():
    u = icrar.draw_innovations(icrar.InnovationSpec.iid(), 1_000_000, icrar.substream(4, 0))
    corr = np.corrcoef(u[:-1], u[1:])[0, 1]
    assert abs(corr) < 0.01


def test_fixed0_initial_condition_is_zero():
    model = icrar.ModelParams(mu=3.0, rho=0.7, n=20)
    val = icrar.draw_initial_condition(
        icrar.InitialConditionSpec("fixed0"), model, icrar.InnovationSpec.iid(),
        icrar.substream(5, 0),
    )
    assert val == 0.0


def test_stationary_at_rho_zero_is_most_recent_presample_draw():
    model = icrar.ModelParams(mu=0.0, rho=0.0, n=10)
    spec = icrar.InitialConditionSpec("stationary")
    val = icrar.draw_initial_condition(spec, model, icrar.InnovationSpec.iid(), icrar.substream(6, 0))
    draws = icrar.substream(6, 0).standard_normal(icrar.default_burn_in(0.0) + 1)
    assert val == pytest.approx(draws[-1], rel=1e-15)


def test_scaled_regimes_are_exact_multiples_on_frozen_stream():
    model = icrar.ModelParams(mu=0.0, rho=0.5, n=150)
    innov = icrar.InnovationSpec.iid()
    values = {}
    for kind in ("stationary", "scaled_sqrt_n", "explosive"):
        values[kind] = icrar.draw_initial_condition(
            icrar.InitialConditionSpec(kind), model, innov, icrar.substream(7, 0)
        )
    assert values["scaled_sqrt_n"] == values["stationary"] * math.sqrt(150)
    assert values["explosive"] == values["stationary"] * 150 ** 0.75


def test_nonfixed_initial_condition_rejects_unit_root():
    model = icrar.ModelParams(mu=0.0, rho=1.0, n=20)
    for kind in ("stationary", "scaled_sqrt_n", "explosive"):
        with pytest.raises(icrar.ParameterError):
            icrar.draw_initial_condition(
                icrar.InitialConditionSpec(kind), model, icrar.InnovationSpec.iid(),
                icrar.substream(8, 0),
            )


def test_default_burn_in_rule():
    assert icrar.default_burn_in(0.0) == 1000
    assert icrar.default_burn_in(0.5) == 1000
    assert icrar.default_burn_in(0.99) == math.ceil(math.log(1e-12) / math.log(0.99))
    assert icrar.default_burn_in(0.99) > 1000


def test_noiseless_recursion_is_geometric():
    # mu=0, U = 0, Y*_0 = c: the recursion decays geometrically.
    rho, c, n = 0.8, 2.5, 12
    u = np.zeros(n)
    y = ar1_closed_form(0.0, rho, c, u)
    assert np.allclose(y, c * rho ** np.arange(n + 1), rtol=0, atol=1e-14)


def test_unit_root_partial_sum():
    u = icrar.substream(9, 0).standard_normal(25)
    y = ar1_closed_form(5.0, 1.0, 0.0, u)
    assert np.allclose(y[1:], 5.0 + np.cumsum(u), rtol=0, atol=1e-12)
    assert y[0] == 5.0


def test_unit_root_simulation_is_level_plus_partial_sum():
    model = icrar.ModelParams(mu=5.0, rho=1.0, n=25)
    innov = icrar.InnovationSpec.iid()
    series = icrar.simulate_series(model, innov, icrar.InitialConditionSpec("fixed0"),
                                   icrar.substream(14, 0))
    parent = icrar.substream(14, 0)
    _, insample = parent.spawn(2)
    u = insample.standard_normal(25)
    assert series.y[0] == 5.0
    assert np.max(np.abs(series.y[1:] - (5.0 + np.cumsum(u)))) <= 1e-12


def test_simulated_series_matches_closed_form():
    model = icrar.ModelParams(mu=1.5, rho=0.9, n=10)
    innov = icrar.InnovationSpec.iid()
    init = icrar.InitialConditionSpec("stationary")
    series = icrar.simulate_series(model, innov, init, icrar.substream(10, 0))
    # replay the exact same streams
    parent = icrar.substream(10, 0)
    pre, insample = parent.spawn(2)
    y0 = icrar.draw_initial_condition(init, model, innov, pre)
    u = icrar.draw_innovations(innov, model.n, insample)
    expected = ar1_closed_form(model.mu, model.rho, y0, u)
    assert np.max(np.abs(series.y - expected)) <= 1e-12
    assert series.n == 10


def test_reproducibility_is_order_independent():
    model = icrar.ModelParams(mu=0.0, rho=0.5, n=50)
    innov = icrar.INNOVATION_PRESETS["garch2"]
    init = icrar.InitialConditionSpec("stationary")
    first = [
        icrar.simulate_series(model, innov, init, icrar.substream(11, r)).y
        for r in range(4)
    ]
    second = [
        icrar.simulate_series(model, innov, init, icrar.substream(11, r)).y
        for r in (2, 0, 3, 1)
    ]
    for r, y in zip((2, 0, 3, 1), second):
        assert np.array_equal(y, first[r])


def test_series_validation():
    with pytest.raises(icrar.ParameterError):
        icrar.TimeSeries(y=np.array([1.0, np.inf, 2.0]))
    with pytest.raises(icrar.ParameterError):
        icrar.ModelParams(mu=0.0, rho=1.2, n=10)
    with pytest.raises(icrar.ParameterError):
        icrar.ModelParams(mu=0.0, rho=0.5, n=3)


def test_warmup_is_discarded():
    spec = icrar.INNOVATION_PRESETS["garch3"]
    u, _ = _variance_recursion(spec, 10, icrar.substream(12, 0))
    assert u.shape == (10,)
    eps = icrar.substream(12, 0).standard_normal(VARIANCE_WARMUP + 10)
    # warm-up consumed the first 500 normals; the output is driven by the rest
    assert not np.allclose(u, eps[:10])


def test_scenario_config_roundtrip():
    spec = icrar.ScenarioSpec(
        model=icrar.ModelParams(mu=2.0, rho=0.9, n=150),
        innov=icrar.INNOVATION_PRESETS["garch1"],
        init=icrar.InitialConditionSpec("scaled_sqrt_n", burn_in=2048),
        reps=500,
        alpha=0.1,
        seed=99,
    )
    text = icrar.scenario_to_config(spec)
    assert icrar.scenario_from_config(text) == spec

    arch_spec = icrar.ScenarioSpec(
        model=icrar.ModelParams(mu=0.0, rho=0.5, n=100),
        innov=icrar.INNOVATION_PRESETS["arch4"],
        init=icrar.InitialConditionSpec("fixed0"),
        reps=10,
        alpha=0.05,
        seed=1,
    )
    assert icrar.scenario_from_config(icrar.scenario_to_config(arch_spec)) == arch_spec


def test_scenario_config_errors():
    good = "model.rho = 0.5\nmodel.n = 100\ninnov.kind = iid\ninit.kind = fixed0\n"
    icrar.scenario_from_config(good)
    with pytest.raises(icrar.ConfigError, match="innov.kind"):
        icrar.scenario_from_config(good.replace("iid", "weird"))
    with pytest.raises(icrar.ConfigError, match="model.rho"):
        icrar.scenario_from_config("model.n = 100\ninnov.kind = iid\ninit.kind = fixed0\n")
    with pytest.raises(icrar.ConfigError, match="bogus"):
        icrar.scenario_from_config(good + "bogus = 1\n")
    with pytest.raises(icrar.ConfigError):
        icrar.scenario_from_config(good + "reps = 0\n")


def test_scenario_file_multiple_cells(tmp_path):
    spec_a = icrar.ScenarioSpec(
        model=icrar.ModelParams(mu=0.0, rho=0.5, n=150),
        innov=icrar.InnovationSpec.iid(),
        init=icrar.InitialConditionSpec("fixed0"),
        reps=5,
    )
    spec_b = icrar.ScenarioSpec(
        model=icrar.ModelParams(mu=0.0, rho=0.9, n=150),
        innov=icrar.INNOVATION_PRESETS["garch1"],
        init=icrar.InitialConditionSpec("explosive"),
        reps=7,
        seed=3,
    )
    path = tmp_path / "cells.cfg"
    path.write_text(
        "# two cells\n"
        + icrar.scenario_to_config(spec_a)
        + "\n"
        + icrar.scenario_to_config(spec_b)
    )
    cells = icrar.load_scenario_file(path)
    assert cells == [spec_a, spec_b]
