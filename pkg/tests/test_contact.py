import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from nswave.contact import (ContactWave, fit_decay_constants, residuals, solve_self_similar,
                            sup_abs_theta_derivative)
from nswave.errors import DegenerateWave, TruncationTooSmall
from nswave.gas import GasParams, ThermoState
from nswave.oracles import time_marched_contact_profile
from nswave.riemann import EndStates

G = GasParams()


@pytest.fixture(scope="module")
def profile_12():
    return solve_self_similar(G, 1.0, 1.2, 1.0)


def _wave(th_minus, th_plus, p=1.0, u=0.0):
    ends = EndStates(ThermoState(G.R * th_minus / p, u, th_minus),
                     ThermoState(G.R * th_plus / p, u, th_plus))
    return ContactWave.from_ends(G, ends)


def test_zero_strength_profile_is_constant():
    prof = solve_self_similar(G, 1.0, 1.0, 1.0)
    assert np.all(prof.theta_of_xi == 1.0) and np.all(prof.dtheta_of_xi == 0.0)
    w = _wave(1.0, 1.0)
    c = w.evaluate(np.linspace(-50, 50, 11), 3.0)
    assert np.all(c.V == 1.0) and np.all(c.U == 0.0) and np.all(c.Theta == 1.0)
    assert np.all(c.U_x == 0.0) and np.all(c.Theta_x == 0.0)
    R1, R2 = residuals(w, np.linspace(-5, 5, 11), 1.0)
    assert np.all(R1 == 0.0) and np.all(R2 == 0.0)


def test_profile_bounds_monotone_and_boundary(profile_12):
    th = profile_12.theta_of_xi
    core = np.abs(profile_12.xi_grid) < 4
    assert np.all(np.diff(th) >= 0) and np.all(np.diff(th[core]) > 0)
    assert np.all(profile_12.dtheta_of_xi >= 0) and np.all(profile_12.dtheta_of_xi[core] > 0)
    assert th.min() >= 1.0 and th.max() <= 1.2
    assert abs(th[0] - 1.0) <= 1e-8 and abs(th[-1] - 1.2) <= 1e-8
    assert profile_12.residual_norm <= 1e-10


def test_decreasing_profile():
    prof = solve_self_similar(G, 1.2, 1.0, 1.0)
    core = np.abs(prof.xi_grid) < 4
    assert np.all(np.diff(prof.theta_of_xi) <= 0)
    assert np.all(np.diff(prof.theta_of_xi[core]) < 0)


def test_profile_matches_time_marched_oracle(profile_12):
    xi, th = time_marched_contact_profile(G, 1.0, 1.2, 1.0)
    sel = np.abs(xi) <= 10
    th_ours, _ = profile_12.theta_and_derivative(xi[sel])
    assert np.max(np.abs(th_ours - th[sel])) <= 1e-4


def test_profile_matches_oracle_at_nonunit_pressure():
    gas = GasParams(R=0.7, kappa=1.3)
    prof = solve_self_similar(gas, 1.0, 1.3, 2.0)
    xi, th = time_marched_contact_profile(gas, 1.0, 1.3, 2.0)
    sel = np.abs(xi) <= 10
    assert np.max(np.abs(prof.theta_and_derivative(xi[sel])[0] - th[sel])) <= 1e-4


def test_symmetric_data_centre_matches_oracle():
    prof = solve_self_similar(G, 0.9, 1.1, 1.0)
    xi, th = time_marched_contact_profile(G, 0.9, 1.1, 1.0)
    centre = th[np.argmin(np.abs(xi))]
    assert float(prof.theta_and_derivative(0.0)[0]) == pytest.approx(centre, abs=1e-5)


def test_truncation_too_small():
    with pytest.raises(TruncationTooSmall):
        solve_self_similar(G, 1.0, 1.2, 1.0, Xi=3.0, n_points=2001)


@pytest.mark.parametrize("args", [(0.0, 1.0, 1.0), (1.0, 1.0, -1.0)])
def test_bad_inputs(args):
    with pytest.raises(ValueError):
        solve_self_similar(G, *args)


def test_from_ends_requires_contact_compatibility():
    with pytest.raises(ValueError):
        ContactWave.from_ends(G, EndStates(ThermoState(1, 0, 1), ThermoState(1, 0.1, 1)))


@settings(max_examples=30, deadline=None)
@given(st.floats(-80, 80), st.floats(0, 200))
def test_pointwise_identities(x, t):
    w = _wave(1.0, 1.2, p=1.3, u=0.4)
    c = w.evaluate(np.array([x]), t)
    assert abs(c.V[0] - G.R * c.Theta[0] / 1.3) <= 1e-12
    k = G.kappa * (G.gamma - 1) / (G.gamma * G.R)
    assert abs(c.U[0] - 0.4 - k * c.Theta_x[0] / c.Theta[0]) <= 1e-12


def test_theta_at_origin_is_time_independent(contact_wave):
    vals = [float(contact_wave.evaluate(0.0, t).Theta) for t in (0.0, 1.0, 50.0)]
    assert vals[0] == vals[1] == vals[2]


def test_scaling_exact():
    w = _wave(1.0, 1.2)
    for order, power in ((1, 0.5), (2, 1.0)):
        vals = [(1 + t) ** power * sup_abs_theta_derivative(w, order, t) for t in (0, 3, 15, 99)]
        assert np.ptp(vals) / np.mean(vals) <= 1e-8


def _fd_t(f, t, h=1e-4):
    return (f(t + h) - f(t - h)) / (2 * h)


def test_mass_and_energy_defects(contact_wave):
    w = contact_wave
    x = np.linspace(-15, 15, 61)
    t = 2.0
    c = w.evaluate(x, t)
    V_t = _fd_t(lambda s: w.evaluate(x, s).V, t)
    assert np.max(np.abs(V_t - c.U_x)) <= 1e-7
    Theta_t = _fd_t(lambda s: w.evaluate(x, s).Theta, t)
    np.testing.assert_allclose(Theta_t, c.Theta_t, atol=1e-7)
    heat_flux_x = (c.Theta_xx / c.V - c.Theta_x * c.V_x / c.V ** 2) * G.kappa
    p = G.R * c.Theta / c.V
    _, R2 = residuals(w, x, t)
    defect = G.c_nu * Theta_t + p * c.U_x - heat_flux_x - G.mu * c.U_x ** 2 / c.V - R2
    assert np.max(np.abs(defect)) <= 1e-7


def test_momentum_residual_matches_finite_differences(contact_wave):
    w = contact_wave
    x = np.linspace(-10, 10, 41)
    t, h = 1.5, 1e-4
    U_t = _fd_t(lambda s: w.evaluate(x, s).U, t)
    flux = lambda y: (lambda c: w.gas.mu * c.U_x / c.V)(w.evaluate(y, t))
    flux_x = (flux(x + h) - flux(x - h)) / (2 * h)
    R1, _ = residuals(w, x, t)
    assert np.max(np.abs(R1 - (U_t - flux_x))) <= 1e-7


def test_residual_gaussian_bound(contact_wave):
    w = contact_wave
    dc = fit_decay_constants(w, [0.0, 1.0, 4.0, 16.0, 64.0], np.linspace(-120, 120, 2401))
    xs = np.linspace(-40, 40, 801)
    worst = 0.0
    for t in np.geomspace(0.1, 100, 12):
        R1, _ = residuals(w, xs, t)
        nz = R1 != 0
        lr = np.log(np.abs(R1[nz])) + 1.5 * math.log1p(t) + dc.c1 * xs[nz] ** 2 / (1 + t)
        worst = max(worst, float(np.max(lr)))
    assert math.isfinite(worst) and math.exp(worst) / w.profile.strength < 10.0


def test_decay_constants_stable_in_delta():
    lattice = ([0.0, 1.0, 4.0, 16.0, 64.0], np.linspace(-120, 120, 2401))
    c_a = fit_decay_constants(_wave(1.0, 1.2), *lattice)
    c_b = fit_decay_constants(_wave(1.0, 1.1), *lattice)
    assert c_a.c1 > 0 and c_a.alpha == pytest.approx(c_a.c1 / 4)
    assert abs(c_a.c1 - c_b.c1) / c_a.c1 <= 0.2


def test_decay_constants_degenerate():
    with pytest.raises(DegenerateWave):
        fit_decay_constants(_wave(1.0, 1.0), [0.0, 1.0], np.linspace(-10, 10, 11))
