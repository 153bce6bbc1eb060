import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from probflux.errors import InvalidArgumentError
from probflux.schemes import (
    LimiterSet, Scheme, Velocity, flux_difference_step, limiter_balance_residual, preset_centered_euler,
    preset_lax_friedrichs, preset_lax_wendroff, preset_limiter_scheme, preset_upwind, step,
    weights_from_fluxes,
)

LIM = LimiterSet(-0.5, -0.5, 0.5, 0.5)


def w(fc, lam):
    return np.array(weights_from_fluxes(fc, lam).as_tuple(), dtype=float)


@pytest.mark.parametrize("fc, lam, expected", [
    (preset_upwind(1.0), 0.5, (0, 0.5, 0.5, 0, 0)),
    (preset_upwind(-1.0), 0.5, (0, 0, 0.5, 0.5, 0)),
    (preset_upwind(1.0), 1.0, (0, 1, 0, 0, 0)),
    (preset_lax_friedrichs(1.0, 0.5), 0.5, (0, 0.75, 0, 0.25, 0)),
    (preset_centered_euler(1.0), 0.5, (0, 0.25, 1, -0.25, 0)),
    (preset_lax_wendroff(1.0, 0.5), 0.5, (0, 0.375, 0.75, -0.125, 0)),
    (preset_lax_wendroff(1.0, 1.0), 1.0, (0, 1, 0, 0, 0)),
])
def test_preset_weights(fc, lam, expected):
    assert np.allclose(w(fc, lam), expected, atol=1e-15)


def test_lax_wendroff_coefficients():
    fc = preset_lax_wendroff(1.0, 0.5)
    assert (fc.b_center, fc.b_next) == (0.75, 0.25)
    assert preset_lax_wendroff(0.0, 0.5).total() == 0


def test_lax_friedrichs_needs_positive_lambda():
    with pytest.raises(InvalidArgumentError):
        preset_lax_friedrichs(1.0, 0.0)


def test_limiter_zero_matches_upwind():
    for v in (-1.3, -0.2, 0.0, 0.7, 2.0):
        a = w(preset_limiter_scheme(Velocity(v), LimiterSet()), 0.4)
        b = w(preset_upwind(v), 0.4)
        assert np.max(np.abs(a - b)) <= 1e-14


def test_limiter_zero_velocity_is_identity():
    assert np.array_equal(w(preset_limiter_scheme(Velocity(0.0), LIM), 0.3), [0, 0, 1, 0, 0])


@pytest.mark.parametrize("v", [1.0, -1.0, 0.4, -2.5])
def test_limiter_stencil_matches_five_point_form(v):
    g1, g2, g3, g4 = -0.3, -0.2, 0.1, 0.6
    lam = 0.37
    vp, vm = max(v, 0), max(-v, 0)
    expected = [
        -lam * vp * g2,
        lam * (vp * (1 + g2) + vm * g4),
        1 - lam * (abs(v) + vm * g4 - vp * g1),
        lam * (vm * (1 - g3) - vp * g1),
        lam * vm * g3,
    ]
    got = w(preset_limiter_scheme(Velocity(v), LimiterSet(g1, g2, g3, g4)), lam)
    assert np.allclose(got, expected, atol=1e-15)


@pytest.mark.parametrize("bad", [(0.1, 0, 0, 0), (0, 0.1, 0, 0), (0, 0, -0.1, 0), (0, 0, 0, -0.1)])
def test_limiter_sign_invariants(bad):
    with pytest.raises(InvalidArgumentError):
        LimiterSet(*bad)


def test_balance_residual_vanishes_without_outer_limiters():
    for v in (-2.0, -0.5, 0.5, 3.0):
        assert limiter_balance_residual(Velocity(v), LimiterSet(-1.0, 0.0, 0.0, 2.0)) == 0
    assert limiter_balance_residual(Velocity(1.0), LIM) != 0


def test_exact_shift_at_unit_cfl():
    out = step([0, 0, 1, 0, 0], preset_upwind(1.0), 1.0)
    assert np.array_equal(out, [0, 0, 0, 1, 0])


def test_pure_forcing():
    u = np.linspace(0, 1, 6)
    out = step(u, preset_upwind(0.0), 0.5, source=np.ones(6), tau=0.1)
    assert np.allclose(out, u + 0.1)


def test_source_needs_tau():
    with pytest.raises(InvalidArgumentError):
        step(np.ones(5), preset_upwind(1.0), 0.5, source=np.ones(5))


@pytest.mark.parametrize("boundary, size", [("periodic", 4), ("cone", 2)])
def test_short_state(boundary, size):
    with pytest.raises(InvalidArgumentError):
        step(np.ones(size), preset_upwind(1.0), 0.5, boundary)


def test_unknown_boundary():
    with pytest.raises(InvalidArgumentError):
        step(np.ones(6), preset_upwind(1.0), 0.5, "reflecting")


def test_cone_edge_rejects_outer_weight():
    with pytest.raises(InvalidArgumentError):
        step(np.ones(7), preset_limiter_scheme(Velocity(1.0), LIM), 0.25, "cone")


def test_cone_step_shortens_layer():
    s = Scheme("limiter", 1.0, LIM)
    out = s.advance(np.arange(9.0), 0.25, "cone")
    assert out.size == 7


def all_presets(a, lam):
    return [
        preset_centered_euler(a), preset_lax_friedrichs(a, lam), preset_upwind(a),
        preset_lax_wendroff(a, lam), preset_limiter_scheme(Velocity(a), LIM),
    ]


@settings(max_examples=60, deadline=None)
@given(a=st.floats(-3, 3), lam=st.floats(0.01, 2.0))
def test_weights_sum_to_one(a, lam):
    for fc in all_presets(a, lam):
        assert abs(weights_from_fluxes(fc, lam).total() - 1) <= 1e-12


@settings(max_examples=40, deadline=None)
@given(a=st.floats(-3, 3), lam=st.floats(0.01, 2.0), c=st.floats(-10, 10))
def test_constant_preserved(a, lam, c):
    for fc in all_presets(a, lam):
        assert np.allclose(step(np.full(8, c), fc, lam), c, atol=1e-12 * max(1, abs(c)))


def test_conservation_and_dual_route(rng):
    for _ in range(20):
        a, lam = rng.uniform(-2, 2), rng.uniform(0.05, 1.5)
        u = rng.normal(size=17)
        for fc in all_presets(a, lam):
            weighted = step(u, fc, lam)
            conservative = flux_difference_step(u, fc, lam)
            assert np.allclose(weighted, conservative, atol=1e-12)
            assert abs(weighted.sum() - u.sum()) <= 1e-10


def test_scheme_rejects_unknown_name():
    with pytest.raises(InvalidArgumentError):
        Scheme("maccormack")
    with pytest.raises(InvalidArgumentError):
        Scheme("upwind", averaging="median")


def test_state_dependent_velocity_averaging():
    s = Scheme("upwind", speed=lambda u: u)
    u = np.array([1.0, 3.0, 5.0, 7.0, 9.0])
    assert np.allclose(s.cell_velocity(u), [5.0, 2.0, 4.0, 6.0, 8.0])
    assert np.allclose(Scheme("upwind", speed=lambda u: u, averaging="cell").cell_velocity(u), u)
    assert np.allclose(s.cell_velocity(u, "cone"), [2.0, 4.0, 6.0])


def test_limiter_cone_edges_drop_outer_terms():
    s = Scheme("limiter", 1.0, LIM)
    fc = s.cell_fluxes(np.zeros(9), 0.25, "cone")
    wts = weights_from_fluxes(fc, 0.25)
    assert wts.w_m2[0] == 0 and wts.w_m2[1] > 0
    assert np.all(np.abs(np.asarray(wts.total()) - 1) < 1e-14)
