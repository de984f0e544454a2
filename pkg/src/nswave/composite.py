"""Superposition of a viscous contact wave with 1- and 3-rarefaction waves.

    (V, U, Theta) = (V_-^r, U_-^r, Theta_-^r) + (V^cd, U^cd, Theta^cd) + (V_+^r, U_+^r, Theta_+^r)
                    - (v_-^m, 0, theta_-^m) - (v_+^m, 0, theta_+^m)

The components are built in the frame where the middle velocity u^m is zero;
``evaluate`` adds u^m back.  Source terms F, G of the perturbation system and
the entropy-flux terms Q1, Q2 are computed from the component fields.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from typing import NamedTuple

import numpy as np

from .contact import ContactValues, ContactWave, solve_self_similar
from .gas import GasParams, entropy, lam, phi_kernel
from .rarefaction import RarefactionValues, RarefactionWave
from .riemann import EndStates, WaveDecomposition, solve_intermediate_states


class CompositeValues(NamedTuple):
    V: np.ndarray
    U: np.ndarray
    Theta: np.ndarray
    V_x: np.ndarray
    U_x: np.ndarray
    Theta_x: np.ndarray
    contact: ContactValues
    minus: RarefactionValues
    plus: RarefactionValues


@dataclass(frozen=True, eq=False)
class CompositeAnsatz:
    contact: ContactWave
    rare_minus: RarefactionWave
    rare_plus: RarefactionWave
    middles: WaveDecomposition
    gas: GasParams
    ends: EndStates

    @classmethod
    def from_ends(cls, g: GasParams, ends: EndStates, Xi: float = 20.0,
                  n_points: int = 8001, tol: float = 1e-10) -> "CompositeAnsatz":
        mid = solve_intermediate_states(g, ends)
        shift = -mid.u_m
        left, right = ends.left.shifted(shift), ends.right.shifted(shift)
        profile = solve_self_similar(g, mid.theta_m_minus, mid.theta_m_plus, mid.p_m,
                                     Xi, n_points, tol)
        return cls(contact=ContactWave(profile, g, 0.0),
                   rare_minus=RarefactionWave("minus", left, mid.v_m_minus, g),
                   rare_plus=RarefactionWave("plus", right, mid.v_m_plus, g),
                   middles=mid, gas=g, ends=ends)

    @property
    def delta(self) -> float:
        return self.middles.delta

    def evaluate(self, x, t: float) -> CompositeValues:
        x = np.asarray(x, dtype=float)
        m = self.middles
        cd = self.contact.evaluate(x, t)
        rm = self.rare_minus.evaluate(x, t)
        rp = self.rare_plus.evaluate(x, t)
        # grouped so zero-strength rarefactions cancel exactly
        V = cd.V + (rm.V - m.v_m_minus) + (rp.V - m.v_m_plus)
        Theta = cd.Theta + (rm.Theta - m.theta_m_minus) + (rp.Theta - m.theta_m_plus)
        U = cd.U + rm.U + rp.U + m.u_m
        return CompositeValues(V, U, Theta,
                               cd.V_x + rm.V_x + rp.V_x,
                               cd.U_x + rm.U_x + rp.U_x,
                               cd.Theta_x + rm.Theta_x + rp.Theta_x,
                               cd, rm, rp)

    # ---- source terms -------------------------------------------------

    def _inner_fluxes(self, x, t):
        g = self.gas
        c = self.evaluate(x, t)
        P = g.R * c.Theta / c.V
        P_minus = g.R * c.minus.Theta / c.minus.V
        P_plus = g.R * c.plus.Theta / c.plus.V
        pressure_part = P_minus + P_plus - P
        viscous = g.mu * c.U_x / c.V
        heat = g.kappa * (c.Theta_x / c.V - c.contact.Theta_x / c.contact.V)
        return pressure_part, viscous, heat, c, P, P_minus, P_plus

    def micro_step(self, t: float) -> float:
        return 1e-4 * math.sqrt(1.0 + t)

    def source_terms(self, x, t: float):
        """(F, G) of the perturbation system at (x, t)."""
        g = self.gas
        x = np.asarray(x, dtype=float)
        h = self.micro_step(t)
        shifted = [self._inner_fluxes(x + k * h, t)[:3] for k in (-2, -1, 1, 2)]
        _, _, _, c, P, P_minus, P_plus = self._inner_fluxes(x, t)

        def d4(i):
            fm2, fm1, fp1, fp2 = (s[i] for s in shifted)
            return (fm2 - 8.0 * fm1 + 8.0 * fp1 - fp2) / (12.0 * h)

        F = d4(0) + d4(1) - c.contact.U_t
        G = ((self.middles.p_m - P) * c.contact.U_x
             + (P_minus - P) * c.minus.U_x + (P_plus - P) * c.plus.U_x
             + g.mu * c.U_x ** 2 / c.V + d4(2))
        return F, G

    def q_terms(self, v, theta, x, t: float, values: CompositeValues | None = None):
        """(Q1, Q2) for the state (v, theta) against the ansatz at (x, t)."""
        g = self.gas
        c = values if values is not None else self.evaluate(x, t)
        v = np.asarray(v, dtype=float)
        theta = np.asarray(theta, dtype=float)
        P = g.R * c.Theta / c.V
        p = g.R * theta / v
        phi_vol = phi_kernel(v / c.V)
        phi_temp = phi_kernel(c.Theta / theta)
        Q1 = P * (phi_kernel(theta * c.V / (v * c.Theta)) + g.gamma * phi_vol)
        phi_, zeta = v - c.V, theta - c.Theta
        pm = self.middles.p_m
        gm1 = g.gamma - 1.0
        P_minus = g.R * c.minus.Theta / c.minus.V
        P_plus = g.R * c.plus.Theta / c.plus.V
        rare_factor = phi_vol - phi_temp / gm1
        Q2 = (c.contact.U_x * (P * phi_ ** 2 / (v * c.V) - pm * phi_vol
                               + pm / gm1 * phi_temp + zeta / theta * (p - P))
              + gm1 * (P_minus - P) * c.minus.U_x * rare_factor
              + gm1 * (P_plus - P) * c.plus.U_x * rare_factor)
        return Q1, Q2

    # ---- region decomposition ----------------------------------------

    def region_speeds(self) -> tuple[float, float]:
        g, m = self.gas, self.middles
        s_minus = entropy(g, self.ends.left)
        s_plus = entropy(g, self.ends.right)
        return (lam(g, "minus", m.v_m_minus, s_minus), lam(g, "plus", m.v_m_plus, s_plus))

    def regions(self, x, t: float):
        """Label array: -1 for Omega_-, 0 for Omega_c, +1 for Omega_+."""
        lm, lp = self.region_speeds()
        x = np.asarray(x, dtype=float)
        label = np.zeros(x.shape, dtype=int)
        label[2 * x < lm * t] = -1
        label[2 * x > lp * t] = 1
        return label

    def rarefaction_layer_quantity(self, x, t: float):
        """Sum over both families of (U^r)_x + |(V^r)_x| + |V^r - v^m| + |(Theta^r)_x| + |Theta^r - theta^m|."""
        m = self.middles
        total = 0.0
        for wave, vm, thm in ((self.rare_minus, m.v_m_minus, m.theta_m_minus),
                              (self.rare_plus, m.v_m_plus, m.theta_m_plus)):
            r = wave.evaluate(x, t)
            total = total + (r.U_x + np.abs(r.V_x) + np.abs(r.V - vm)
                             + np.abs(r.Theta_x) + np.abs(r.Theta - thm))
        return total


def q1_unfactored(g: GasParams, v, theta, V, Theta):
    """Q1 as the sum of its four terms before factoring."""
    P = g.R * Theta / V
    p = g.R * theta / v
    phi_, zeta = v - V, theta - Theta
    return ((g.gamma - 1.0) * P * phi_kernel(v / V) + P * phi_ ** 2 / (v * V)
            - P * phi_kernel(Theta / theta) + zeta / theta * (p - P))


@dataclass(frozen=True)
class RegionDecayFit:
    K: float
    c0: float
    n_points: int


def fit_region_decay(c: CompositeAnsatz, t_samples, x_samples, margin: float = 0.9,
                     floor: float = 1e-13) -> RegionDecayFit:
    """Fit K, c0 with layer quantity <= K delta exp(-c0(|x| + t)) inside Omega_c."""
    delta = c.delta
    if delta <= 0:
        raise ValueError("composite has zero strength")
    s_all, q_all = [], []
    x_samples = np.asarray(x_samples, dtype=float)
    for t in t_samples:
        inside = c.regions(x_samples, t) == 0
        if not np.any(inside):
            continue
        xs = x_samples[inside]
        q = c.rarefaction_layer_quantity(xs, t) / delta
        s_all.append(np.abs(xs) + t)
        q_all.append(q)
    s, q = np.concatenate(s_all), np.concatenate(q_all)
    keep = q > floor
    # upper envelope per bin of s, then a log-linear fit of the envelope
    edges = np.linspace(s[keep].min(), s[keep].max(), 25)
    idx = np.clip(np.digitize(s[keep], edges) - 1, 0, len(edges) - 2)
    env_s, env_q = [], []
    for k in range(len(edges) - 1):
        sel = idx == k
        if np.any(sel):
            j = np.argmax(q[keep][sel])
            env_s.append(s[keep][sel][j])
            env_q.append(q[keep][sel][j])
    slope = np.polyfit(env_s, np.log(env_q), 1)[0]
    c0 = margin * (-slope)
    if not c0 > 0:
        raise ValueError(f"layer quantity does not decay in Omega_c (slope {slope})")
    pos = q > 0
    K = float(np.max(q[pos] * np.exp(c0 * s[pos])))
    return RegionDecayFit(K=K, c0=float(c0), n_points=int(s.size))
