"""Rarefaction wave curves of the Euler Riemann problem (R1-C-R3 patterns).

The 1-family (``minus``) and 3-family (``plus``) curves through an anchor
state are isentropes along which

    u(v) = u_a - int_{v_a}^{v} lambda(eta, s_a) d eta.

With lambda a power law in eta the integral is closed form and reduces to the
familiar Riemann invariant ``u -+ 2 c / (gamma - 1)`` with ``c = sqrt(gamma R theta)``.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import ConvergenceFailure, NoIntersection
from .gas import (Family, GasParams, ThermoState, entropy, family_sign, lam,
                  pressure)

VM_SLACK = 1e-12
ISENTROPE_TOL = 1e-8


@dataclass(frozen=True)
class EndStates:
    left: ThermoState
    right: ThermoState


@dataclass(frozen=True)
class WaveDecomposition:
    v_m_minus: float
    v_m_plus: float
    theta_m_minus: float
    theta_m_plus: float
    u_m: float
    p_m: float
    delta: float

    def middle_minus(self) -> ThermoState:
        return ThermoState(self.v_m_minus, self.u_m, self.theta_m_minus)

    def middle_plus(self) -> ThermoState:
        return ThermoState(self.v_m_plus, self.u_m, self.theta_m_plus)


def is_contact_compatible(g: GasParams, ends: EndStates, tol: float = 1e-10) -> bool:
    if tol <= 0:
        raise ValueError("tol must be positive")
    p_l, p_r = pressure(g, ends.left), pressure(g, ends.right)
    return (abs(ends.right.u - ends.left.u) <= tol
            and abs(p_r - p_l) <= tol * max(p_l, p_r))


def rarefaction_u_along_curve(g: GasParams, family: Family, anchor: ThermoState,
                              v):
    """Velocity reached at volume ``v`` along the ``family`` curve through ``anchor``.

    ``v`` may be a float or an array.
    """
    v_arr = np.asarray(v, dtype=float)
    if np.any(~(v_arr > 0)):
        raise ValueError("v must be positive")
    sign = family_sign(family)
    gm1 = g.gamma - 1.0
    c_a = math.sqrt(g.gamma * g.R * anchor.theta)
    # int_{v_a}^{v} eta^{-(gamma+1)/2} d eta, scaled by sqrt(gamma R theta_a) v_a^{(gamma-1)/2}
    integral = (2.0 / gm1) * c_a * (1.0 - (anchor.v / v_arr) ** (0.5 * gm1))
    out = anchor.u - sign * integral
    return float(out) if out.ndim == 0 else out


def _state_at_pressure(g: GasParams, anchor: ThermoState, p: float) -> tuple[float, float]:
    """(v, theta) on the isentrope through ``anchor`` at pressure ``p``."""
    v = anchor.v * (pressure(g, anchor) / p) ** (1.0 / g.gamma)
    return v, p * v / g.R


def _u_minus(g, left, p):
    v, _ = _state_at_pressure(g, left, p)
    return rarefaction_u_along_curve(g, "minus", left, v)


def _u_plus(g, right, p):
    # the 3-curve is anchored at the right state; solve u^m from u_+ = u^m - int ...
    v, _ = _state_at_pressure(g, right, p)
    return rarefaction_u_along_curve(g, "plus", right, v)


def solve_intermediate_states(g: GasParams, ends: EndStates,
                              tol: float = 1e-12) -> WaveDecomposition:
    """Intersect the 1-rarefaction curve of the left state with the 3-rarefaction
    curve of the right state.

    The velocity gap ``u_minus(p) - u_plus(p)`` is strictly decreasing in the
    middle pressure, so plain bisection on ``(0, min(p_-, p_+)]`` is used.
    """
    if tol <= 0:
        raise ValueError("tol must be positive")
    left, right = ends.left, ends.right
    p_hi = min(pressure(g, left), pressure(g, right))

    def gap(p):
        return _u_minus(g, left, p) - _u_plus(g, right, p)

    scale = max(1.0, abs(left.u), abs(right.u),
                math.sqrt(g.gamma * g.R * left.theta), math.sqrt(g.gamma * g.R * right.theta))
    g_hi = gap(p_hi)
    if g_hi > tol * scale:
        # would need p_m above an end pressure: a shock, not a rarefaction
        raise NoIntersection(
            f"wave curves meet above min(p-, p+) (velocity gap {g_hi:.3e} at p={p_hi:.6g}); "
            "state pair is outside R1-C-R3")
    gm1 = g.gamma - 1.0
    gap_vacuum = (left.u + 2.0 * math.sqrt(g.gamma * g.R * left.theta) / gm1
                  - right.u + 2.0 * math.sqrt(g.gamma * g.R * right.theta) / gm1)
    if gap_vacuum <= 0:
        raise NoIntersection("rarefaction curves reach vacuum before meeting")

    if abs(g_hi) <= tol * scale:
        p_m = p_hi
    else:
        lo, hi = 0.0, p_hi
        p_m = 0.5 * (lo + hi)
        for _ in range(400):
            p_m = 0.5 * (lo + hi)
            if gap(p_m) > 0:
                lo = p_m
            else:
                hi = p_m
            if hi - lo <= 4e-16 * hi:
                break
        p_m = 0.5 * (lo + hi)
    residual = abs(gap(p_m))
    if residual > tol * scale:
        raise ConvergenceFailure(f"bisection stalled with velocity gap {residual:.3e}")

    v_l, th_l = _state_at_pressure(g, left, p_m)
    v_r, th_r = _state_at_pressure(g, right, p_m)
    if v_l < left.v * (1 - VM_SLACK) or v_r < right.v * (1 - VM_SLACK):
        raise NoIntersection("intermediate volume below end volume: not a rarefaction")
    v_l, v_r = max(v_l, left.v), max(v_r, right.v)
    th_l, th_r = p_m * v_l / g.R, p_m * v_r / g.R
    u_m = 0.5 * (_u_minus(g, left, p_m) + _u_plus(g, right, p_m))
    return WaveDecomposition(
        v_m_minus=v_l, v_m_plus=v_r, theta_m_minus=th_l, theta_m_plus=th_r,
        u_m=u_m, p_m=p_m, delta=abs(right.theta - left.theta))


def exact_rarefaction_fan(g: GasParams, family: Family, head: ThermoState,
                          tail: ThermoState, xi: float) -> ThermoState:
    """Self-similar fan state at xi = x/t.

    ``head`` is the state on the slow side (smaller lambda), ``tail`` the fast side.
    """
    s_head, s_tail = entropy(g, head), entropy(g, tail)
    if abs(s_head - s_tail) > ISENTROPE_TOL * max(1.0, abs(s_head)):
        raise ValueError("head and tail are not on a common isentrope")
    lam_head = lam(g, family, head.v, s_head)
    lam_tail = lam(g, family, tail.v, s_head)
    if lam_head > lam_tail:
        raise ValueError("lambda decreases from head to tail: compressive fan")
    if xi <= lam_head:
        return head
    if xi >= lam_tail:
        return tail
    # invert lambda(v, s) = xi on the isentrope
    coeff = g.A * g.gamma * math.exp((g.gamma - 1.0) * s_head / g.R)
    v = (coeff / (xi * xi)) ** (1.0 / (g.gamma + 1.0))
    theta = head.theta * (head.v / v) ** (g.gamma - 1.0)
    u = rarefaction_u_along_curve(g, family, head, v)
    return ThermoState(v, u, theta)


def composite_from_middle(g: GasParams, left: ThermoState, p_m: float,
                          theta_m_plus: float, p_right: float) -> EndStates:
    """Forward-construct an R1-C-R3 pair: walk down the 1-curve of ``left`` to
    ``p_m``, jump across a contact to ``theta_m_plus``, walk up the 3-curve to
    ``p_right``.  Used for building experiments with prescribed wave strengths."""
    v_l, _ = _state_at_pressure(g, left, p_m)
    u_m = rarefaction_u_along_curve(g, "minus", left, v_l)
    mid_plus = ThermoState(g.R * theta_m_plus / p_m, u_m, theta_m_plus)
    v_r, th_r = _state_at_pressure(g, mid_plus, p_right)
    # walking the 3-curve from the middle gives u_+ = u^m + int_{v_+}^{v_+^m} lambda_+
    u_r = rarefaction_u_along_curve(g, "plus", mid_plus, v_r)
    return EndStates(left, ThermoState(v_r, u_r, th_r))
