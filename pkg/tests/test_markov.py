import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from probflux import markov
from probflux.errors import InconsistencyError, StabilityError
from probflux.grid import build_cone, build_periodic
from probflux.schemes import LimiterSet, Scheme, StencilWeights

PRESETS = ("centered-euler", "lax-friedrichs", "upwind", "lax-wendroff")


def test_transition_table_of_upwind():
    tt = markov.transition_table(Scheme("upwind", 1.0).weights(0.5))
    assert tt.as_tuple() == (0, 0.5, 0.5, 0, 0)
    assert tt.probabilistic


def test_table_rejects_bad_sum():
    with pytest.raises(InconsistencyError):
        markov.transition_table(StencilWeights(0, 0.5, 0.6, 0, 0))


def test_lax_wendroff_violation_reported():
    rep = markov.check_stability(Scheme("lax-wendroff", 1.0), 0.5)
    assert not rep.probabilistic
    assert rep.violated_entries == [(1, -0.125)]
    assert rep.limiter_feasible is None


def test_upwind_report():
    rep = markov.check_stability(Scheme("upwind", 1.0), 0.5)
    assert rep.probabilistic and rep.cfl_bound == 1.0


def test_centered_euler_never_probabilistic():
    for a in (-2.0, -0.5, 0.5, 2.0):
        assert not markov.check_stability(Scheme("centered-euler", a), 0.3).probabilistic
    assert markov.check_stability(Scheme("centered-euler", 0.0), 0.3).probabilistic


def test_upwind_moments():
    tt = markov.transition_table(Scheme("upwind", 1.0).weights(0.5))
    mom = markov.chain_moments(tt, 1.0, 0.5)
    assert mom.drift == -0.5 and mom.v_mc == -1.0 and mom.second_moment == 0.5


@pytest.mark.parametrize("name", PRESETS + ("limiter",))
@pytest.mark.parametrize("v", [-1.5, -0.4, 0.3, 1.2])
def test_symbolic_moments_match_table(name, v):
    scheme = Scheme(name, v, LimiterSet(-0.3, -0.2, 0.1, 0.4))
    tau, h = 0.07, 0.2
    tt = markov.transition_table(scheme.weights(tau / h))
    mom = markov.chain_moments(tt, h, tau)
    assert mom.v_mc == pytest.approx(markov.symbolic_chain_velocity(scheme), abs=1e-12)
    assert mom.second_moment == pytest.approx(markov.symbolic_second_moment(scheme, tau, h), abs=1e-14)
    assert mom.covariance == pytest.approx(markov.symbolic_covariance(scheme, tau, h), abs=1e-14)


@pytest.mark.parametrize("v", [-2.0, -0.5, 0.5, 2.0])
def test_linear_preset_chain_velocity_is_minus_v(v):
    for name in PRESETS:
        assert markov.symbolic_chain_velocity(Scheme(name, v)) == pytest.approx(-v)


def test_consistency_residuals():
    s = Scheme("upwind", 1.0)
    summ = markov.stability_summary(s, 0.1, 0.2)
    assert summ["local_residual"] == 0 and summ["local_residual_minus_v"] == 0
    assert summ["global_residual"] == 0
    assert summ["local_residual_plus_v"] > 0


def test_landau_constant_and_flux_sum():
    assert markov.landau_constant(0.1, 0.1, 1.0) == pytest.approx(1.0)
    lim = Scheme("limiter", 1.0, LimiterSet(-0.5, -0.5, 0.5, 0.5))
    assert markov.flux_sum(lim, 0.5) == pytest.approx(-2.0)
    assert markov.flux_sum(Scheme("limiter", -1.0, LimiterSet(-0.5, -0.5, 0.5, 0.5)), 0.5) == pytest.approx(0.0)


@pytest.mark.parametrize("scheme", [
    Scheme("upwind", 1.7), Scheme("upwind", -0.6), Scheme("lax-friedrichs", 2.0), Scheme("lax-friedrichs", -0.5),
    Scheme("limiter", 1.0, LimiterSet(-3.0, 0, 0, 0)), Scheme("limiter", -1.0, LimiterSet(0, 0, 0, 3.0)),
    Scheme("limiter", 0.8, LimiterSet(-0.4, -0.1, 0.0, 0.0)),
])
def test_cfl_bound_matches_bisection(scheme):
    closed = markov.cfl_bound(scheme)
    assert closed == pytest.approx(markov.cfl_bound_numeric(scheme), rel=1e-9)


def test_cfl_special_cases():
    assert markov.cfl_bound(Scheme("upwind", 0.0)) == math.inf
    assert markov.cfl_bound(Scheme("centered-euler", 1.0)) == 0
    assert markov.cfl_bound(Scheme("lax-wendroff", -2.0)) == 0.5
    # a negative side weight cannot be cured by shrinking lambda
    assert markov.cfl_bound(Scheme("limiter", 1.0, LimiterSet(0.0, -1.5, 0.0, 0.0))) == 0
    assert markov.cfl_bound(Scheme("limiter", 1.0, LimiterSet(-0.5, -0.5, 0.5, 0.5))) == pytest.approx(2 / 3)


def test_limiter_feasibility():
    s = Scheme("limiter", 1.0, LimiterSet(-3.0, 0, 0, 0))
    assert markov.check_stability(s, 0.25).limiter_feasible
    assert not markov.check_stability(s, 0.3).limiter_feasible


def test_summary_is_json_ready():
    import json
    summ = markov.stability_summary(Scheme("upwind", 0.0), 0.1, 0.2)
    json.dumps(summ, allow_nan=False)
    assert summ["cfl_bound"] is None


def test_expectation_identity(rng):
    grid = build_periodic(12, 0.1, 0.05)
    for name, a in (("upwind", 0.8), ("lax-friedrichs", -1.2), ("limiter", 1.0)):
        s = Scheme(name, a, LimiterSet(-3.0, 0, 0, 0) if name == "limiter" else LimiterSet())
        lam = 0.25 if name == "limiter" else grid.lam()
        u = rng.normal(size=12)
        assert np.allclose(markov.transition_matrix(u, s, lam) @ u, s.advance(u, lam), atol=1e-12)


def test_transition_matrix_rows_sum_to_one_on_cone():
    s = Scheme("limiter", 1.0, LimiterSet(-0.2, -0.1, 0.0, 0.0))
    mat = markov.transition_matrix(np.zeros(9), s, 0.3, "cone")
    assert mat.shape == (7, 9)
    assert np.allclose(mat.sum(axis=1), 1)


def test_evolve_cone_layers():
    g = build_cone(4, 0.25, 0.125)
    layers = markov.evolve_deterministic(np.ones(9), Scheme("upwind", 1.0), g)
    assert [l.size for l in layers] == [9, 7, 5, 3, 1]
    assert all(np.allclose(l, 1) for l in layers)


def test_strict_evolution_raises():
    g = build_periodic(10, 0.1, 0.05)
    with pytest.raises(StabilityError) as exc:
        markov.evolve_deterministic(np.ones(10), Scheme("lax-wendroff", 1.0), g, 3, strict=True)
    assert exc.value.report.violated_entries == [(1, -0.125)]
    markov.evolve_deterministic(np.ones(10), Scheme("lax-wendroff", 1.0), g, 3)


def test_source_is_added():
    g = build_periodic(8, 0.1, 0.05)
    layers = markov.evolve_deterministic(np.zeros(8), Scheme("upwind", 0.0), g, 4, source=lambda t, x, u: 1.0)
    assert np.allclose(layers[-1], 0.2)


def gauss_cone(n=5):
    g = build_cone(n, 0.2, 0.1)
    x = g.layer_x(0)
    return g, np.exp(-((x - 1.0) / 0.3) ** 2)


def test_mc_agrees_with_deterministic():
    g, d0 = gauss_cone()
    s = Scheme("upwind", 1.0)
    det = markov.evolve_deterministic(d0, s, g)[-1][0]
    res = markov.simulate_mc((5, 5), d0, s, g, 40000, seed=3)
    assert abs(res.estimate - det) <= 4 * res.std_error


def test_mc_with_source_and_periodic_ring():
    g = build_periodic(10, 0.1, 0.05)
    x = g.x
    d0 = np.sin(2 * np.pi * x)
    s = Scheme("lax-friedrichs", 1.0)
    src = lambda t, x, u: 1.0 + 0 * x
    det = markov.evolve_deterministic(d0, s, g, 6, source=src)[-1][3]
    res = markov.simulate_mc((6, 3), d0, s, g, 40000, seed=11, source=src)
    assert abs(res.estimate - det) <= 4 * res.std_error


def test_mc_independent_of_workers():
    g, d0 = gauss_cone()
    s = Scheme("upwind", 1.0)
    a = markov.simulate_mc((5, 5), d0, s, g, 30000, seed=9, workers=1)
    b = markov.simulate_mc((5, 5), d0, s, g, 30000, seed=9, workers=4)
    assert a == b


def test_mc_deterministic_chain_has_zero_error():
    g, d0 = gauss_cone()
    res = markov.simulate_mc((5, 5), d0, Scheme("upwind", 2.0), g, 100, seed=0)
    det = markov.evolve_deterministic(d0, Scheme("upwind", 2.0), g)[-1][0]
    assert res.std_error == 0 and res.estimate == pytest.approx(det, abs=1e-15)


def test_mc_refuses_negative_weights():
    g, d0 = gauss_cone()
    with pytest.raises(StabilityError):
        markov.simulate_mc((5, 5), d0, Scheme("lax-wendroff", 1.0), g, 100, seed=0)


def test_mc_target_validation():
    g, d0 = gauss_cone()
    with pytest.raises(Exception):
        markov.simulate_mc((2, 1), d0, Scheme("upwind", 1.0), g, 100, seed=0)
    with pytest.raises(Exception):
        markov.simulate_mc((5, 5), d0, Scheme("upwind", 1.0), g, 100, seed=-1)


def test_thresholds_skip_empty_tail():
    cuts = markov._thresholds(np.array([[0.0], [0.5], [0.5], [0.0], [0.0]]))
    assert cuts[0].tolist() == [0.0, 0.5, 2.0, 2.0]


@settings(max_examples=30, deadline=None)
@given(a=st.floats(-2, 2), lam=st.floats(0.05, 1.5))
def test_verdict_matches_weight_signs(a, lam):
    for name in PRESETS:
        s = Scheme(name, a)
        w = np.array(s.weights(lam).as_tuple(), dtype=float)
        assert markov.check_stability(s, lam).probabilistic == bool(np.all(w >= -markov.PROB_TOL))
