"""Viscous contact wave built from the self-similar nonlinear heat equation.

The temperature profile solves ``Theta_t = a (Theta_x / Theta)_x`` with
``a = kappa p_+ (gamma - 1) / (gamma R^2)``.  With ``Theta = Theta(xi)``,
``xi = x / sqrt(1 + t)`` this reduces to the boundary-value problem

    -(xi / 2) Theta' = a (ln Theta)'',   Theta(-Xi) = theta_-,  Theta(Xi) = theta_+.

From it ``V = R Theta / p_+`` and ``U = kappa (gamma - 1) / (gamma R) Theta_x / Theta``.
All higher xi-derivatives are recovered from the ODE itself, so every field
returned by :meth:`ContactWave.evaluate` is smooth in x and t.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import NamedTuple, Optional

import numpy as np
from scipy.integrate import cumulative_trapezoid
from scipy.interpolate import CubicHermiteSpline
from scipy.linalg import solve_banded
from scipy.optimize import minimize_scalar

from .errors import ConvergenceFailure, DegenerateWave, TruncationTooSmall
from .gas import GasParams, ThermoState, pressure
from .riemann import EndStates, is_contact_compatible

TAIL_DERIVATIVE_MAX = 1e-10


def heat_coefficient(g: GasParams, p_plus: float) -> float:
    """Diffusivity ``a`` of the temperature equation in the ``(ln Theta)_xx`` form."""
    return g.kappa * p_plus * (g.gamma - 1.0) / (g.gamma * g.R ** 2)


@dataclass(frozen=True, eq=False)
class SelfSimilarProfile:
    xi_grid: np.ndarray
    theta_of_xi: np.ndarray
    dtheta_of_xi: np.ndarray
    theta_minus: float
    theta_plus: float
    p_plus: float
    b_coeff: float
    Xi: float
    residual_norm: float = 0.0
    newton_iterations: int = 0

    def __post_init__(self):
        d2 = self.second_derivative(self.xi_grid, self.theta_of_xi, self.dtheta_of_xi)
        object.__setattr__(self, "_theta_spline",
                           CubicHermiteSpline(self.xi_grid, self.theta_of_xi, self.dtheta_of_xi))
        object.__setattr__(self, "_dtheta_spline",
                           CubicHermiteSpline(self.xi_grid, self.dtheta_of_xi, d2))

    @property
    def strength(self) -> float:
        return abs(self.theta_plus - self.theta_minus)

    def second_derivative(self, xi, theta, dtheta):
        # (ln Theta)'' = -xi Theta' / (2a)
        return dtheta ** 2 / theta - xi * theta * dtheta / (2.0 * self.b_coeff)

    def third_derivative(self, xi, theta, dtheta):
        a = self.b_coeff
        d2 = self.second_derivative(xi, theta, dtheta)
        return (2.0 * dtheta * d2 / theta - dtheta ** 3 / theta ** 2
                - (theta * dtheta + xi * dtheta ** 2 + xi * theta * d2) / (2.0 * a))

    def theta_and_derivative(self, xi):
        """(Theta, Theta') at ``xi`` with constant extension beyond +-Xi."""
        xi = np.asarray(xi, dtype=float)
        inside = np.abs(xi) <= self.Xi
        xi_c = np.clip(xi, -self.Xi, self.Xi)
        theta = np.where(inside, self._theta_spline(xi_c),
                         np.where(xi < 0, self.theta_minus, self.theta_plus))
        dtheta = np.where(inside, self._dtheta_spline(xi_c), 0.0)
        return theta, dtheta


def _residual(theta, xi, h, a):
    """Discrete residual of -(xi/2) Theta' - a (ln Theta)'' at interior nodes."""
    L = np.log(theta)
    return (-(xi[1:-1] / 2.0) * (theta[2:] - theta[:-2]) / (2.0 * h)
            - a * (L[2:] - 2.0 * L[1:-1] + L[:-2]) / h ** 2)


def _jacobian_bands(theta, xi, h, a):
    xi_i = xi[1:-1]
    lower = xi_i / (4.0 * h) - a / (h ** 2 * theta[:-2])
    diag = 2.0 * a / (h ** 2 * theta[1:-1])
    upper = -xi_i / (4.0 * h) - a / (h ** 2 * theta[2:])
    m = len(xi_i)
    ab = np.zeros((3, m))
    ab[0, 1:] = upper[:-1]
    ab[1, :] = diag
    ab[2, :-1] = lower[1:]
    return ab


def _newton(theta, xi, h, a, tol, max_iter=60, polish=2):
    res = _residual(theta, xi, h, a)
    norm = np.max(np.abs(res))
    it = 0
    extra = polish
    while (norm > tol or extra > 0) and it < max_iter:
        if norm <= tol:
            extra -= 1
        it += 1
        step = solve_banded((1, 1), _jacobian_bands(theta, xi, h, a), -res)
        lam = 1.0
        while True:
            trial = theta.copy()
            trial[1:-1] += lam * step
            if np.all(trial > 0):
                trial_res = _residual(trial, xi, h, a)
                trial_norm = np.max(np.abs(trial_res))
                if trial_norm < norm or lam < 1e-4:
                    break
            lam *= 0.5
            if lam < 1e-6:
                return theta, norm, it, norm <= tol
        if norm <= tol and trial_norm >= norm:
            break
        theta, res, norm = trial, trial_res, trial_norm
    return theta, norm, it, norm <= tol


def _pseudo_time_relaxation(theta, xi, h, a, n_steps=200, dtau=0.05):
    """Backward-Euler marching of Theta_tau = -residual toward the steady profile."""
    for _ in range(n_steps):
        old = theta.copy()
        for _ in range(20):
            res = (theta[1:-1] - old[1:-1]) / dtau + _residual(theta, xi, h, a)
            ab = _jacobian_bands(theta, xi, h, a)
            ab[1, :] += 1.0 / dtau
            dth = solve_banded((1, 1), ab, -res)
            theta = theta.copy()
            theta[1:-1] += dth
            theta = np.maximum(theta, 1e-300)
            if np.max(np.abs(dth)) < 1e-13:
                break
        dtau = min(dtau * 1.5, 1e3)
    return theta


def _derivative_from_first_integral(xi, theta, a, jump):
    """Theta' from the first integral of the ODE.

    ``q = a Theta'/Theta`` obeys ``q' = -(xi Theta / 2a) q``, so
    ``q(xi) = q0 exp(-int_0^xi eta Theta / (2a))`` with q0 fixed by
    ``int Theta' = theta_+ - theta_-``.  Sign and Gaussian tails come out exact.
    """
    i0 = int(np.argmin(np.abs(xi)))
    cum = cumulative_trapezoid(xi * theta, xi, initial=0.0)
    expo = -(cum - cum[i0]) / (2.0 * a)
    shape = theta * np.exp(expo) / a
    norm = np.trapezoid(shape, xi)
    return jump * shape / norm


def solve_self_similar(g: GasParams, theta_minus: float, theta_plus: float,
                       p_plus: float, Xi: float = 20.0, n_points: int = 8001,
                       tol: float = 1e-10) -> SelfSimilarProfile:
    if min(theta_minus, theta_plus, p_plus) <= 0:
        raise ValueError("theta_-, theta_+ and p_+ must be positive")
    if Xi <= 0 or n_points < 1001 or tol <= 0:
        raise ValueError("need Xi > 0, n_points >= 1001, tol > 0")
    a = heat_coefficient(g, p_plus)
    xi = np.linspace(-Xi, Xi, n_points)
    h = xi[1] - xi[0]
    if theta_minus == theta_plus:
        return SelfSimilarProfile(xi, np.full(n_points, float(theta_minus)), np.zeros(n_points),
                                  theta_minus, theta_plus, p_plus, a, Xi)

    theta = theta_minus + (theta_plus - theta_minus) * 0.5 * (1.0 + np.tanh(xi))
    theta, norm, iters, ok = _newton(theta, xi, h, a, tol)
    if not ok:
        theta = _pseudo_time_relaxation(theta, xi, h, a)
        theta, norm, more, ok = _newton(theta, xi, h, a, tol)
        iters += more
    if not ok:
        raise ConvergenceFailure(f"self-similar solve stalled at residual {norm:.3e}")

    dtheta = _derivative_from_first_integral(xi, theta, a, theta_plus - theta_minus)
    edge = max(abs(dtheta[0]), abs(dtheta[-1]))
    if edge > TAIL_DERIVATIVE_MAX:
        raise TruncationTooSmall(f"|Theta'(+-Xi)| = {edge:.3e}; increase Xi")
    return SelfSimilarProfile(xi, theta, dtheta, theta_minus, theta_plus, p_plus, a, Xi,
                              residual_norm=float(norm), newton_iterations=iters)


class ContactValues(NamedTuple):
    V: np.ndarray
    U: np.ndarray
    Theta: np.ndarray
    V_x: np.ndarray
    U_x: np.ndarray
    Theta_x: np.ndarray
    Theta_xx: np.ndarray
    U_t: np.ndarray
    U_xx: np.ndarray
    Theta_t: np.ndarray


@dataclass(frozen=True, eq=False)
class ContactWave:
    """Viscous contact wave; ``u_shift`` is the common end velocity."""

    profile: SelfSimilarProfile
    gas: GasParams
    u_shift: float = 0.0

    @classmethod
    def from_ends(cls, g: GasParams, ends: EndStates, Xi: float = 20.0,
                  n_points: int = 8001, tol: float = 1e-10, compat_tol: float = 1e-10):
        if not is_contact_compatible(g, ends, compat_tol):
            raise ValueError("end states do not satisfy u- = u+, p- = p+")
        prof = solve_self_similar(g, ends.left.theta, ends.right.theta,
                                  pressure(g, ends.right), Xi, n_points, tol)
        return cls(prof, g, 0.5 * (ends.left.u + ends.right.u))

    @property
    def p_plus(self) -> float:
        return self.profile.p_plus

    @property
    def u_coeff(self) -> float:
        g = self.gas
        return g.kappa * (g.gamma - 1.0) / (g.gamma * g.R)

    def far_field(self) -> tuple[ThermoState, ThermoState]:
        R, p = self.gas.R, self.p_plus
        th_m, th_p = self.profile.theta_minus, self.profile.theta_plus
        return (ThermoState(R * th_m / p, self.u_shift, th_m),
                ThermoState(R * th_p / p, self.u_shift, th_p))

    def evaluate(self, x, t) -> ContactValues:
        prof = self.profile
        x = np.asarray(x, dtype=float)
        s = math.sqrt(1.0 + t)
        xi = x / s
        th, d1 = prof.theta_and_derivative(xi)
        d2 = prof.second_derivative(xi, th, d1)
        d3 = prof.third_derivative(xi, th, d1)
        R, p, k = self.gas.R, self.p_plus, self.u_coeff
        # l1 = (ln Theta)', l2 = (ln Theta)'', l3 = (ln Theta)''' as functions of xi
        l1 = d1 / th
        l2 = d2 / th - l1 ** 2
        l3 = d3 / th - 3.0 * l1 * l2 - l1 ** 3
        V = R * th / p
        V_x = R * d1 / (p * s)
        U = self.u_shift + k * l1 / s
        U_x = k * l2 / s ** 2
        U_xx = k * l3 / s ** 3
        U_t = -k * (l1 + xi * l2) / (2.0 * s ** 3)
        Theta_x = d1 / s
        Theta_xx = d2 / s ** 2
        Theta_t = -xi * d1 / (2.0 * s ** 2)
        return ContactValues(V, U, th, V_x, U_x, Theta_x, Theta_xx, U_t, U_xx, Theta_t)


def residuals(w: ContactWave, x, t):
    """(R1, R2) with R1 = U_t - mu (U_x/V)_x and R2 = -mu U_x^2 / V."""
    c = w.evaluate(x, t)
    mu = w.gas.mu
    flux_x = c.U_xx / c.V - c.U_x * c.V_x / c.V ** 2
    return c.U_t - mu * flux_x, -mu * c.U_x ** 2 / c.V


def sup_abs_theta_derivative(w: ContactWave, order: int, t: float,
                             n_scan: int = 4001) -> float:
    """sup_x |d^order Theta / dx^order| at time t, maximized continuously in x."""
    if order not in (1, 2):
        raise ValueError("order must be 1 or 2")
    span = w.profile.Xi * math.sqrt(1.0 + t)

    def f(x):
        c = w.evaluate(x, t)
        return np.abs(c.Theta_x if order == 1 else c.Theta_xx)

    xs = np.linspace(-span, span, n_scan)
    vals = f(xs)
    i = int(np.argmax(vals))
    dx = xs[1] - xs[0]
    lo, hi = xs[max(i - 1, 0)], xs[min(i + 1, n_scan - 1)]
    if hi - lo < dx:
        return float(vals[i])
    res = minimize_scalar(lambda z: -float(f(z)), bounds=(lo, hi), method="bounded",
                          options={"xatol": 1e-10 * max(1.0, span)})
    return max(float(vals[i]), -float(res.fun))


@dataclass(frozen=True)
class DecayConstants:
    c1: float
    alpha: float
    c0: Optional[float] = None
    bound_constant: float = float("nan")
    rates: tuple = field(default=())

    def __post_init__(self):
        if not self.c1 > 0:
            raise ValueError("c1 must be positive")
        if not 0 < self.alpha <= self.c1 / 4 * (1 + 1e-12):
            raise ValueError("alpha must lie in (0, c1/4]")
        if self.c0 is not None and not self.c0 > 0:
            raise ValueError("c0 must be positive")


def gaussian_profile_quantity(w: ContactWave, x, t):
    """(1+t)|Theta_xx| + (1+t)^{1/2}|Theta_x| + |Theta - theta_+-|."""
    c = w.evaluate(x, t)
    x = np.asarray(x, dtype=float)
    far = np.where(x < 0, w.profile.theta_minus, w.profile.theta_plus)
    return ((1.0 + t) * np.abs(c.Theta_xx) + math.sqrt(1.0 + t) * np.abs(c.Theta_x)
            + np.abs(c.Theta - far))


def fit_decay_constants(w: ContactWave, t_samples, x_samples,
                        margin: float = 0.9) -> DecayConstants:
    """Fit the Gaussian rate c1 of the profile bounds from the lattice tails.

    For each side the decay rate of the combined quantity is regressed against
    ``x^2/(1+t)`` over the tail window; ``c1`` is ``margin`` times the slower
    side (the margin absorbs polynomial prefactors), and the reported
    constant is the lattice maximum of quantity / (delta exp(-c1 x^2/(1+t))).
    """
    delta = w.profile.strength
    if delta == 0:
        raise DegenerateWave("zero-strength contact wave has no decay rate")
    t_samples = np.asarray(t_samples, dtype=float)
    x_samples = np.asarray(x_samples, dtype=float)
    zs, qs, sides = [], [], []
    for t in t_samples:
        q = gaussian_profile_quantity(w, x_samples, t) / delta
        zs.append(x_samples ** 2 / (1.0 + t))
        qs.append(q)
        sides.append(np.sign(x_samples))
    z, q, side = np.concatenate(zs), np.concatenate(qs), np.concatenate(sides)
    rates = []
    for sgn in (-1.0, 1.0):
        sel = (side == sgn) & (q > 1e-13) & (q < 1e-3)
        if np.count_nonzero(sel) < 3 or np.ptp(z[sel]) <= 0:
            raise DegenerateWave("lattice does not resolve the Gaussian tails")
        slope = np.polyfit(z[sel], np.log(q[sel]), 1)[0]
        rates.append(-slope)
    c1 = margin * min(rates)
    if not c1 > 0:
        raise DegenerateWave(f"non-decaying tails (rates {rates})")
    pos = q > 0
    bound = float(np.max(np.exp(np.log(q[pos]) + c1 * z[pos])))
    return DecayConstants(c1=c1, alpha=c1 / 4.0, bound_constant=bound, rates=tuple(rates))
