"""Smooth approximate rarefaction waves.

A rarefaction of either family is driven by the inviscid Burgers equation
``w_t + w w_x = 0`` with monotone tanh data

    w(x, 0) = (w_r + w_l)/2 + (w_r - w_l)/2 * tanh(x),

solved exactly along characteristics.  The wave state is then read off the
isentrope through the anchor (far-field) state: ``lambda(V, s) = w``.
"""
from __future__ import annotations

import math
import warnings
from dataclasses import dataclass, field
from typing import NamedTuple

import numpy as np
from scipy.integrate import IntegrationWarning, quad
from scipy.optimize import minimize_scalar
from scipy.special import expit

from .errors import ConvergenceFailure, QuadratureFailure
from .gas import Family, GasParams, ThermoState, entropy, family_sign, lam
from .riemann import rarefaction_u_along_curve


@dataclass(frozen=True)
class BurgersWave:
    w_l: float
    w_r: float

    def __post_init__(self):
        if not (math.isfinite(self.w_l) and math.isfinite(self.w_r)):
            raise ValueError("Burgers end speeds must be finite")
        if self.w_l > self.w_r:
            raise ValueError("w_l > w_r would form a shock")

    @property
    def strength(self) -> float:
        return self.w_r - self.w_l

    def initial(self, y):
        return self.w_l + self.strength * expit(2.0 * np.asarray(y, dtype=float))

    def initial_slope(self, y):
        z = 2.0 * np.asarray(y, dtype=float)
        return 2.0 * self.strength * expit(z) * expit(-z)


def characteristic_foot(b: BurgersWave, x, t: float, tol: float = 1e-12, max_iter: int = 200):
    """Solve x = y + w0(y) t for the foot y of the characteristic through (x, t).

    Newton steps safeguarded by the bracket [x - w_r t, x - w_l t]; the map is
    strictly increasing so the root is unique.
    """
    x = np.asarray(x, dtype=float)
    if t < 0:
        raise ValueError("t must be non-negative")
    if t == 0 or b.strength == 0:
        return x - b.w_l * t
    lo = x - b.w_r * t
    hi = x - b.w_l * t
    y = x - 0.5 * (b.w_l + b.w_r) * t
    # residual terms are of size |w| t, so that sets the attainable accuracy
    scale = tol * np.maximum(np.maximum(1.0, np.abs(x)), max(abs(b.w_l), abs(b.w_r)) * t)
    prev = np.full_like(y, np.inf)
    for _ in range(max_iter):
        F = y + b.initial(y) * t - x
        done = (np.abs(F) <= scale) | (hi - lo <= 4e-16 * np.maximum(1.0, np.abs(y)))
        if np.all(done):
            return y
        hi = np.where(F > 0, y, hi)
        lo = np.where(F < 0, y, lo)
        y_new = y - F / (1.0 + b.initial_slope(y) * t)
        # bisect when Newton leaves the bracket or fails to halve the residual
        bad = ~((y_new >= lo) & (y_new <= hi)) | (np.abs(F) > 0.5 * prev)
        prev = np.abs(F)
        y_new = np.where(bad, 0.5 * (lo + hi), y_new)
        y = np.where(done, y, y_new)
    raise ConvergenceFailure("characteristic root solve did not converge")


def burgers_eval(b: BurgersWave, x, t: float, tol: float = 1e-12):
    """(w, w_x) at (x, t)."""
    if tol <= 0:
        raise ValueError("tol must be positive")
    y = characteristic_foot(b, x, t, tol)
    slope = b.initial_slope(y)
    return b.initial(y), slope / (1.0 + slope * t)


def riemann_fan(b: BurgersWave, x, t: float):
    """Centred rarefaction w^r(x/t) of the Riemann problem w_l | w_r."""
    return np.clip(np.asarray(x, dtype=float) / t, b.w_l, b.w_r)


def fan_distance(b: BurgersWave, t: float, n: int = 20001) -> float:
    """sup_x |w(x, t) - w^r(x/t)| over a window covering the fan and its edges."""
    pad = 20.0
    x = np.linspace(b.w_l * t - pad, b.w_r * t + pad, n)
    w, _ = burgers_eval(b, x, t)
    return float(np.max(np.abs(w - riemann_fan(b, x, t))))


class RarefactionValues(NamedTuple):
    V: np.ndarray
    U: np.ndarray
    Theta: np.ndarray
    V_x: np.ndarray
    U_x: np.ndarray
    Theta_x: np.ndarray
    w: np.ndarray
    w_x: np.ndarray


@dataclass(frozen=True, eq=False)
class RarefactionWave:
    """Smooth rarefaction connecting ``anchor`` (far field) to volume ``target_vm``."""

    family: Family
    anchor: ThermoState
    target_vm: float
    gas: GasParams
    burgers: BurgersWave = field(init=False)

    def __post_init__(self):
        g = self.gas
        if self.target_vm < self.anchor.v:
            raise ValueError("rarefaction must expand: target_vm >= anchor volume")
        s = entropy(g, self.anchor)
        lam_anchor = lam(g, self.family, self.anchor.v, s)
        lam_target = lam(g, self.family, self.target_vm, s)
        if self.family == "minus":
            w_l, w_r = lam_anchor, lam_target
        else:
            w_l, w_r = lam_target, lam_anchor
        object.__setattr__(self, "burgers", BurgersWave(w_l, w_r))

    @property
    def entropy(self) -> float:
        return entropy(self.gas, self.anchor)

    @property
    def is_trivial(self) -> bool:
        return self.target_vm == self.anchor.v

    def middle_state(self) -> ThermoState:
        a, g = self.anchor, self.gas
        theta = a.theta * (a.v / self.target_vm) ** (g.gamma - 1.0)
        return ThermoState(self.target_vm,
                           rarefaction_u_along_curve(g, self.family, a, self.target_vm), theta)

    def evaluate(self, x, t: float) -> RarefactionValues:
        g, a = self.gas, self.anchor
        x = np.asarray(x, dtype=float)
        if self.is_trivial:
            ones, zeros = np.ones_like(x), np.zeros_like(x)
            w0 = self.burgers.w_l
            return RarefactionValues(a.v * ones, a.u * ones, a.theta * ones,
                                     zeros, zeros, zeros, w0 * ones, zeros)
        w, w_x = burgers_eval(self.burgers, x, t)
        if np.any(w * family_sign(self.family) <= 0):
            raise ValueError("Burgers speed crossed zero for this family")
        coeff = g.gamma * g.R * a.theta * a.v ** (g.gamma - 1.0)
        V = (coeff / w ** 2) ** (1.0 / (g.gamma + 1.0))
        U = rarefaction_u_along_curve(g, self.family, a, V)
        Theta = a.theta * (a.v / V) ** (g.gamma - 1.0)
        V_x = -(2.0 / (g.gamma + 1.0)) * V / w * w_x
        U_x = -w * V_x
        Theta_x = (1.0 - g.gamma) * Theta * V_x / V
        return RarefactionValues(V, U, Theta, V_x, U_x, Theta_x, w, w_x)


def rarefaction_eval(r: RarefactionWave, x, t: float) -> RarefactionValues:
    return r.evaluate(x, t)


@dataclass
class RateTable:
    t: np.ndarray
    norms: dict            # p -> array of ||w_x(t)||_{L^p}
    slopes: dict           # p -> fitted log-log slope
    expected: dict         # p -> -1 + 1/p

    def rows(self):
        for p in self.norms:
            for t, val in zip(self.t, self.norms[p]):
                yield p, float(t), float(val), self.slopes[p], self.expected[p]


def _integration_window(b: BurgersWave, t: float, p: float, floor: float = 1e-16):
    lo, hi = b.w_l * t, b.w_r * t
    pad = 4.0
    while True:
        _, wx = burgers_eval(b, np.array([lo - pad, hi + pad]), t)
        if np.all(wx ** p < floor):
            return lo - pad, hi + pad
        pad *= 2.0
        if pad > 1e6:
            raise QuadratureFailure("tail of |w_x|^p does not decay")


def lp_norm_wx(b: BurgersWave, p: float, t: float) -> float:
    """||w_x(t)||_{L^p(R)} by adaptive quadrature (p = inf: continuous maximization)."""
    if math.isinf(p):
        xs = np.linspace(b.w_l * t - 10, b.w_r * t + 10, 4001)
        _, wx = burgers_eval(b, xs, t)
        i = int(np.argmax(wx))
        lo, hi = xs[max(i - 1, 0)], xs[min(i + 1, len(xs) - 1)]
        res = minimize_scalar(lambda z: -float(burgers_eval(b, z, t)[1]), bounds=(lo, hi),
                              method="bounded", options={"xatol": 1e-12})
        return max(float(wx[i]), -float(res.fun))
    a, c = _integration_window(b, t, p)
    pts = [z for z in (b.w_l * t, b.w_r * t) if a < z < c]

    def integrand(z):
        return float(burgers_eval(b, z, t)[1]) ** p

    with warnings.catch_warnings():
        warnings.simplefilter("error", IntegrationWarning)
        try:
            val, _ = quad(integrand, a, c, points=pts or None, epsabs=1e-15,
                          epsrel=1e-13, limit=500)
        except IntegrationWarning as exc:
            raise QuadratureFailure(str(exc)) from exc
    return val ** (1.0 / p)


def lp_rate_report(b: BurgersWave, p_exponents, t_samples) -> RateTable:
    if b.strength <= 0:
        raise ValueError("rate report needs w_r > w_l")
    t = np.asarray(sorted(t_samples), dtype=float)
    if t[0] <= 0 or t[-1] / t[0] < 100 * (1 - 1e-12):
        raise ValueError("t_samples must be positive and span at least two decades")
    norms, slopes, expected = {}, {}, {}
    for p in p_exponents:
        vals = np.array([lp_norm_wx(b, p, ti) for ti in t])
        norms[p] = vals
        slopes[p] = float(np.polyfit(np.log(t), np.log(vals), 1)[0])
        expected[p] = -1.0 + (0.0 if math.isinf(p) else 1.0 / p)
    return RateTable(t, norms, slopes, expected)
