"""Independent reference computations used by the verification suite.

Each oracle reaches its answer by a route that shares no code with the
implementation it checks.
"""
from __future__ import annotations

import math

import numpy as np
from scipy.integrate import quad, solve_ivp
from scipy.sparse import diags

from .gas import GasParams


def time_marched_contact_profile(g: GasParams, theta_minus: float, theta_plus: float,
                                 p_plus: float, t_final: float = 100.0,
                                 half_width: float = 300.0, n: int = 30001,
                                 step_width: float = 0.05):
    """March the contact-wave temperature equation from a step in physical time.

    Combining ``V_t = U_x`` with the energy balance ``c_nu Theta_t + p_+ U_x =
    kappa (Theta_x / V)_x`` and ``V = R Theta / p_+`` gives

        (c_nu + R) Theta_t = kappa (p_+ / R) (Theta_x / Theta)_x,

    which is integrated by BDF from a (slightly smoothed) step.  Step data makes
    the solution self-similar in x / sqrt(t), so the profile at time ``t_final``
    sampled at ``x = xi sqrt(t_final)`` is the oracle for Theta(xi).
    Returns ``(xi, theta)``.
    """
    x = np.linspace(-half_width, half_width, n)
    dx = x[1] - x[0]
    diff = g.kappa * p_plus / (g.R * (g.c_nu + g.R))
    theta0 = theta_minus + (theta_plus - theta_minus) * 0.5 * (1 + np.tanh(x / step_width))

    def rhs(_t, th):
        lnth = np.log(th)
        flux = diff * np.diff(lnth) / dx
        out = np.zeros_like(th)
        out[1:-1] = np.diff(flux) / dx
        return out

    sparsity = diags([1, 1, 1], [-1, 0, 1], shape=(n, n))
    sol = solve_ivp(rhs, (0.0, t_final), theta0, method="BDF", jac_sparsity=sparsity,
                    rtol=1e-10, atol=1e-12)
    if not sol.success:
        raise RuntimeError(sol.message)
    return x / math.sqrt(t_final), sol.y[:, -1]


def curve_velocity_by_quadrature(g: GasParams, sign: int, v_a: float, theta_a: float,
                                 u_a: float, v: float) -> float:
    """u_a - int_{v_a}^{v} lambda(eta) d eta with lambda from its defining formula."""
    s_a = g.c_nu * math.log(g.R * theta_a / g.A) + g.R * math.log(v_a)

    def lam(eta):
        return sign * math.sqrt(g.A * g.gamma * eta ** (-g.gamma - 1)
                                * math.exp((g.gamma - 1) * s_a / g.R))

    val, _ = quad(lam, v_a, v, epsabs=1e-14, epsrel=1e-13, limit=200)
    return u_a - val


def bisect(f, lo: float, hi: float, tol: float = 1e-14, max_iter: int = 500) -> float:
    """Plain bisection for a sign change of ``f`` on ``[lo, hi]``."""
    f_lo = f(lo)
    if f_lo * f(hi) > 0:
        raise ValueError("no sign change on bracket")
    for _ in range(max_iter):
        mid = 0.5 * (lo + hi)
        f_mid = f(mid)
        if (f_mid > 0) == (f_lo > 0):
            lo, f_lo = mid, f_mid
        else:
            hi = mid
        if hi - lo <= tol * max(1.0, abs(mid)):
            break
    return 0.5 * (lo + hi)
