"""Model parameters, schedules, drift statistics, configuration round trips."""

import numpy as np
import pytest

from impscram.geometry import (C_LIGHT, ModelParams, build_schedule,
                               build_schedule_2d, build_schedule_truncated,
                               parse_config, sample_drift, touched_sites)
from impscram.sites import SiteId


def test_params_validation():
    with pytest.raises(ValueError):
        ModelParams(p=1.4, v_d=1)
    with pytest.raises(ValueError):
        ModelParams(p=0.1, v_d=25.0)  # exceeds d_max
    with pytest.raises(ValueError):
        ModelParams(p=0.1, v_d=1, t2=0)
    with pytest.raises(ValueError):
        ModelParams(p=0.1, v_d=1, drift_mode="gauss")
    assert ModelParams(p=0.1, v_d=2).p_drift == 0.1


def test_sample_drift_limits():
    r = np.random.default_rng(0)
    p0 = ModelParams(p=0.1, v_d=0.0)
    assert all(sample_drift(p0, r) == 0 for _ in range(50))
    p1 = ModelParams(p=0.1, v_d=20.0, d_max=20)
    assert all(sample_drift(p1, r) == 20 for _ in range(50))
    pdet = ModelParams(p=0.1, v_d=3, drift_mode="deterministic")
    assert sample_drift(pdet, r) == 3


def test_drift_moments():
    """Binomial moments: mean v_d, variance d_max p_D (1 - p_D)."""
    params = ModelParams(p=0.0, v_d=2.0, d_max=20)
    r = np.random.default_rng(1)
    draws = np.array([sample_drift(params, r) for _ in range(10**5)])
    var = 20 * 0.1 * 0.9
    assert abs(draws.mean() - 2.0) < 3 * np.sqrt(var / draws.size)
    assert abs(draws.var() - var) < 0.05


def test_schedule_determinism_and_trajectory():
    params = ModelParams(p=0.3, v_d=1.0, t1=20, t2=30)
    s1 = build_schedule(params, seed=5)
    s2 = build_schedule(params, seed=5)
    assert (s1.drifts == s2.drifts).all()
    assert (s1.swaps == s2.swaps).all()
    assert (s1.x_of_t == s2.x_of_t).all()
    assert s1.gate_at(3, 1, -2) == s2.gate_at(3, 1, -2)
    assert (np.cumsum(s1.drifts) == s1.x_of_t[1:]).all()
    pdet = params.with_(drift_mode="deterministic", v_d=3)
    sd = build_schedule(pdet, seed=0)
    assert (sd.x_of_t == 3 * np.arange(51)).all()


def test_reset_placement():
    # t1 >= t1+t2 is impossible once t2 >= 1 is enforced; the reset always
    # lands strictly inside the run
    params = ModelParams(p=0.1, v_d=1.0, t1=60, t2=1)
    sch = build_schedule(params, seed=0)
    assert sch.reset_step == 60
    assert sch.total_steps == 61


def test_expected_swap_count():
    """Bernoulli counting across many schedules."""
    params = ModelParams(p=0.2, v_d=1.0, t1=10, t2=40)
    total = sum(build_schedule(params, seed=s).swaps.sum() for s in range(2000))
    n = 2000 * 50
    sigma = np.sqrt(n * 0.2 * 0.8)
    assert abs(total - 0.2 * n) < 5 * sigma


def test_p_zero_has_no_swaps():
    sch = build_schedule(ModelParams(p=0.0, v_d=1.0, t1=5, t2=5), seed=3)
    assert not sch.swaps.any() and sch.swap_events() == []


def test_touched_sites_bound():
    params = ModelParams(p=0.3, v_d=1.0, t1=10, t2=20)
    sch = build_schedule(params, seed=2)
    layout = touched_sites(sch)
    mediums = [s for s in layout if s.kind == "M"]
    t_total = sch.total_steps
    assert len(mediums) <= (2 * C_LIGHT * t_total + 20 * t_total) + 10
    for t, x in sch.swap_events():
        assert SiteId("M", 0, x) in layout
    # registers present
    kinds = {s.kind for s in layout}
    assert {"A", "I", "D", "R", "AR"} <= kinds


def test_truncated_builder_flags_mode():
    params = ModelParams(p=0.1, v_d=1.0, t1=5, t2=5)
    sch = build_schedule_truncated(params, seed=0)
    assert sch.params.boundary_mode == "truncated"


def test_schedule_2d_structure():
    params = ModelParams(p=0.4, v_d=1.0, t1=None, t2=30, n_impurity=8)
    sch = build_schedule_2d(params, seed=0)
    assert sch.swaps.shape == (30, 2, 8)
    assert sch.strip_seeds.shape == (8,)
    assert len(set(sch.strip_seeds.tolist())) == 8
    sch2 = build_schedule_2d(params, seed=0)
    assert (sch.swaps == sch2.swaps).all() and (sch.drifts == sch2.drifts).all()


def test_config_round_trip(tmp_path):
    params = ModelParams(p=0.15, v_d=1.3, d_max=18, t1=70, t2=222,
                         drift_mode="deterministic", boundary_mode="truncated",
                         interaction_mode="clifford", n_impurity=4, seed=99)
    text = params.to_config()
    back = ModelParams.from_config(text)
    assert back == params
    none_t1 = params.with_(t1=None, boundary_mode="open")
    assert ModelParams.from_config(none_t1.to_config()).t1 is None
    with pytest.raises(ValueError):
        parse_config("this is not a key value line")
