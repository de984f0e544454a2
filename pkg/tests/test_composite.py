import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from nswave.acceptance import composite_ends
from nswave.composite import CompositeAnsatz, fit_region_decay, q1_unfactored
from nswave.contact import ContactWave, residuals
from nswave.diagnostics import trapz
from nswave.gas import GasParams, ThermoState, phi_kernel
from nswave.riemann import EndStates, composite_from_middle

G = GasParams()


def test_far_field_limits(composite):
    ends = composite.ends
    a = composite.evaluate(np.array([-100.0, 100.0]), 0.0)
    for k, s in ((0, ends.left), (1, ends.right)):
        assert abs(a.V[k] - s.v) <= 1e-6
        assert abs(a.U[k] - s.u) <= 1e-6
        assert abs(a.Theta[k] - s.theta) <= 1e-6


def test_zero_rarefaction_strength_reduces_to_contact():
    ends = EndStates(ThermoState(1.0, -0.2, 1.0), ThermoState(1.15, -0.2, 1.15))
    comp = CompositeAnsatz.from_ends(G, ends)
    wave = ContactWave.from_ends(G, ends)
    x = np.linspace(-30, 30, 301)
    a, b = comp.evaluate(x, 2.0), wave.evaluate(x, 2.0)
    np.testing.assert_array_equal(a.V, b.V)
    np.testing.assert_array_equal(a.Theta, b.Theta)
    np.testing.assert_allclose(a.U, b.U, atol=1e-15)
    F, Gs = comp.source_terms(x, 2.0)
    R1, R2 = residuals(wave, x, 2.0)
    np.testing.assert_allclose(F, -R1, atol=1e-9)
    np.testing.assert_allclose(Gs, -R2, atol=1e-9)


def test_zero_contact_strength_sums_rarefactions():
    left = ThermoState(1.0, 0.0, 1.0)
    p_m = 0.93
    th_m = (p_m) ** ((G.gamma - 1) / G.gamma)
    ends = composite_from_middle(G, left, p_m, th_m, 0.97)
    comp = CompositeAnsatz.from_ends(G, ends)
    m = comp.middles
    assert m.theta_m_minus == pytest.approx(m.theta_m_plus, abs=1e-12)
    x = np.linspace(-40, 40, 161)
    a = comp.evaluate(x, 3.0)
    rm, rp = comp.rare_minus.evaluate(x, 3.0), comp.rare_plus.evaluate(x, 3.0)
    np.testing.assert_allclose(a.V, rm.V + rp.V - m.v_m_minus, atol=1e-14)
    np.testing.assert_allclose(a.Theta, rm.Theta + rp.Theta - m.theta_m_minus, atol=1e-14)


def test_component_sum_at_origin(composite):
    c = composite
    m = c.middles
    a = c.evaluate(np.array([0.0]), 1.0)
    cd = c.contact.evaluate(np.array([0.0]), 1.0)
    r1 = c.rare_minus.evaluate(np.array([0.0]), 1.0)
    r3 = c.rare_plus.evaluate(np.array([0.0]), 1.0)
    assert a.V[0] == pytest.approx(r1.V[0] + cd.V[0] + r3.V[0] - m.v_m_minus - m.v_m_plus, abs=1e-15)
    assert a.U[0] == pytest.approx(r1.U[0] + cd.U[0] + r3.U[0] + m.u_m, abs=1e-15)
    assert a.U_x[0] == pytest.approx(r1.U_x[0] + cd.U_x[0] + r3.U_x[0], abs=1e-15)


def test_derivatives_consistent(composite):
    x = np.linspace(-30, 30, 121)
    h = 1e-5
    a = composite.evaluate(x, 4.0)
    ap, am = composite.evaluate(x + h, 4.0), composite.evaluate(x - h, 4.0)
    for f in ("V", "U", "Theta"):
        np.testing.assert_allclose(getattr(a, f + "_x"), (getattr(ap, f) - getattr(am, f)) / (2 * h),
                                   atol=1e-7)


def test_sources_vanish_for_constant_state():
    s = ThermoState(1.0, 0.1, 1.0)
    comp = CompositeAnsatz.from_ends(G, EndStates(s, s))
    F, Gs = comp.source_terms(np.linspace(-10, 10, 41), 1.0)
    assert np.all(F == 0.0) and np.all(Gs == 0.0)


def test_source_l1_weighted_bounded(composite):
    x = np.linspace(-150, 150, 12001)
    dx = x[1] - x[0]
    series = []
    for t in np.concatenate([[0.0], np.geomspace(0.1, 100, 10)]):
        F, Gs = composite.source_terms(x, t)
        series.append((1 + t) ** 0.875 * trapz(np.abs(F) + np.abs(Gs), dx))
    assert all(math.isfinite(v) for v in series)
    assert series[0] > 0
    assert max(series) < 10.0


def test_rarefaction_velocity_gradients_nonnegative(composite):
    x = np.linspace(-150, 150, 1501)
    for t in (0.0, 1.0, 10.0, 100.0):
        a = composite.evaluate(x, t)
        assert np.all(a.minus.U_x >= 0) and np.all(a.plus.U_x >= 0)
        # with u^m = 0 the 3-wave velocity is nonnegative, the 1-wave velocity nonpositive
        assert np.all(a.plus.U >= -1e-15) and np.all(a.minus.U <= 1e-15)


def test_q1_zero_at_ansatz(composite):
    x = np.linspace(-20, 20, 81)
    a = composite.evaluate(x, 1.0)
    Q1, Q2 = composite.q_terms(a.V, a.Theta, x, 1.0)
    assert np.all(Q1 == 0.0) and np.all(Q2 == 0.0)


@settings(max_examples=50, deadline=None)
@given(st.floats(0.2, 5), st.floats(0.2, 5), st.floats(0.2, 5), st.floats(0.2, 5))
def test_q1_two_forms_agree_and_nonnegative(v, theta, V, Theta):
    P = G.R * Theta / V
    closed = P * (phi_kernel(theta * V / (v * Theta)) + G.gamma * phi_kernel(v / V))
    assert closed >= 0
    assert abs(closed - q1_unfactored(G, v, theta, V, Theta)) <= 1e-10 * max(1.0, closed)


def test_q1_nonnegative_on_field(composite):
    rng = np.random.default_rng(3)
    x = np.linspace(-40, 40, 401)
    a = composite.evaluate(x, 5.0)
    Q1, _ = composite.q_terms(a.V * rng.uniform(0.6, 1.5, x.size),
                              a.Theta * rng.uniform(0.6, 1.5, x.size), x, 5.0, values=a)
    assert np.all(Q1 >= 0)


def test_regions_partition(composite):
    x = np.linspace(-50, 50, 1001)
    lab = composite.regions(x, 10.0)
    assert set(np.unique(lab)) == {-1, 0, 1}
    assert np.all(np.diff(lab) >= 0)
    np.testing.assert_array_equal(composite.regions(x, 0.0), np.sign(x).astype(int))


def test_region_decay_fit_holds_on_fresh_lattice(composite):
    fit = fit_region_decay(composite, np.linspace(0.5, 40, 30), np.linspace(-80, 80, 641))
    assert fit.c0 > 0 and math.isfinite(fit.K)
    ts = np.linspace(0.7, 35, 23)
    xs = np.linspace(-70, 70, 577)
    for t in ts:
        inside = composite.regions(xs, t) == 0
        q = composite.rarefaction_layer_quantity(xs[inside], t)
        bound = fit.K * composite.delta * np.exp(-fit.c0 * (np.abs(xs[inside]) + t))
        assert np.all(q <= bound * 1.05 + 1e-14)


def test_composite_ends_helper():
    ends = composite_ends(0.05)
    comp = CompositeAnsatz.from_ends(G, ends)
    assert comp.middles.theta_m_plus - comp.middles.theta_m_minus == pytest.approx(0.05, rel=1e-9)
    assert comp.rare_minus.burgers.strength > 0 and comp.rare_plus.burgers.strength > 0
