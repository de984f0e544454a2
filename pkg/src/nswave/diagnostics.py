"""Energy functionals, weighted norms and decay fits on solver output.

The perturbation is (phi, psi, zeta) = (v - V, u - U, theta - Theta).  Spatial
integrals use the trapezoidal rule on the grid nodes; time integrals are
accumulated by the left-rectangle rule between observer calls.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field, replace

import numpy as np
from scipy.optimize import brentq
from scipy.special import erf

from .composite import CompositeAnsatz
from .contact import ContactWave, residuals
from .errors import InsufficientSamples
from .gas import GasParams, phi_kernel
from .solver import FieldState


def trapz(f, dx: float) -> float:
    f = np.asarray(f, dtype=float)
    return float(dx * (f.sum() - 0.5 * (f[0] + f[-1])))


@dataclass(frozen=True)
class WeightKernel:
    alpha: float

    def __post_init__(self):
        if not (math.isfinite(self.alpha) and self.alpha > 0):
            raise ValueError("alpha must be positive")

    def w(self, x, t: float):
        x = np.asarray(x, dtype=float)
        return np.exp(-self.alpha * x * x / (1.0 + t)) / math.sqrt(1.0 + t)

    def g(self, x, t: float):
        """int_{-inf}^x w(y, t) dy."""
        x = np.asarray(x, dtype=float)
        r = math.sqrt(self.alpha / (1.0 + t))
        return 0.5 * math.sqrt(math.pi / self.alpha) * (1.0 + erf(r * x))

    def g_infinity(self) -> float:
        return math.sqrt(math.pi / self.alpha)

    def w_square_integral(self, t: float) -> float:
        return math.sqrt(math.pi / (2.0 * self.alpha)) / math.sqrt(1.0 + t)


def sigma_tilde(t: float) -> float:
    return min(t, 1.0)


@dataclass(frozen=True)
class Perturbation:
    phi: np.ndarray
    psi: np.ndarray
    zeta: np.ndarray
    ansatz: object      # evaluated ansatz values at the field's nodes and time


def perturbation(field: FieldState, ansatz) -> Perturbation:
    a = ansatz.evaluate(field.grid.nodes, field.t)
    return Perturbation(field.v - a.V, field.u - a.U, field.theta - a.Theta, a)


def entropy_density(g: GasParams, field: FieldState, a, psi) -> np.ndarray:
    return (0.5 * psi ** 2 + g.R * a.Theta * phi_kernel(field.v / a.V)
            + g.c_nu * a.Theta * phi_kernel(field.theta / a.Theta))


def relative_entropy_total(field: FieldState, ansatz) -> float:
    """int (psi^2/2 + R Theta Phi(v/V) + c_nu Theta Phi(theta/Theta)) dx."""
    p = perturbation(field, ansatz)
    return trapz(entropy_density(ansatz.gas, field, p.ansatz, p.psi), field.grid.dx)


def perturbation_norms(field: FieldState, pert: Perturbation) -> dict:
    dx = field.grid.dx
    comps = (pert.phi, pert.psi, pert.zeta)
    sup = max(float(np.max(np.abs(c))) for c in comps)
    l2 = math.sqrt(sum(trapz(c ** 2, dx) for c in comps))
    grad = sum(float(np.sum(np.diff(c) ** 2)) / dx for c in comps)
    return {"sup_pert": sup, "l2_pert": l2, "h1_pert": math.sqrt(l2 ** 2 + grad)}


def omega_measure(field: FieldState, Theta, a: float = 2.0) -> float:
    """|{x : theta / Theta > a}| counted in whole cells around the nodes."""
    return float(np.count_nonzero(field.theta / Theta > a) * field.grid.dx)


def omega2_bound(g: GasParams, entropy_total: float, theta_minus: float) -> float:
    return 3.0 / (1.0 - math.log(2.0)) * entropy_total / (g.c_nu * theta_minus)


def alpha_roots(g: GasParams, C0: float, theta_minus: float) -> tuple[float, float]:
    """Roots alpha_1 < 1 < alpha_2 of y - ln y - 1 = min(3C0/(R theta_-), 3C0/(c_nu theta_-))."""
    level = min(3.0 * C0 / (g.R * theta_minus), 3.0 * C0 / (g.c_nu * theta_minus))
    if level <= 0:
        return 1.0, 1.0

    def f(s):     # in log variables, so tiny alpha_1 keeps full relative accuracy
        return math.expm1(s) - s - level

    lo = -1.0
    while f(lo) < 0:
        lo *= 2.0
    hi = 1.0
    while f(hi) < 0:
        hi *= 2.0
    s1 = brentq(f, lo, 0.0, xtol=1e-15, rtol=4 * np.finfo(float).eps)
    s2 = brentq(f, 0.0, hi, xtol=1e-15, rtol=4 * np.finfo(float).eps)
    return math.exp(s1), math.exp(s2)


# ---- integrands of the accumulated functionals --------------------------

def dissipative_group(g: GasParams, v, theta, phi, zeta, V, Theta, Theta_x, U_x):
    """Theta_x^2 and U_x^2 weighted perturbation products common to G and D."""
    heat = g.kappa * Theta_x ** 2 / (v * theta ** 2) * (
        zeta ** 2 / Theta + Theta * phi ** 2 / V ** 2 + np.abs(zeta * phi) / V)
    visc = g.mu * U_x ** 2 / v * (
        4.0 * zeta ** 2 / (theta * Theta) + np.abs(zeta * phi) / (theta * V)
        + theta * phi ** 2 / (Theta * V ** 2))
    return heat + visc


def g_integrand(field: FieldState, wave: ContactWave, pert: Perturbation | None = None):
    g = wave.gas
    p = pert or perturbation(field, wave)
    a = p.ansatz
    v, theta = field.v, field.theta
    p_plus = wave.p_plus
    pressure = g.R * theta / v
    first = dissipative_group(g, v, theta, p.phi, p.zeta, a.V, a.Theta, a.Theta_x, a.U_x)
    second = (p_plus * phi_kernel(a.V / v) + p_plus / abs(g.gamma - 1.0) * phi_kernel(a.Theta / theta)
              + np.abs(p.zeta) / theta * np.abs(p_plus - pressure)) * np.abs(a.U_x)
    R1, R2 = residuals(wave, field.grid.nodes, field.t)
    third = np.abs(p.psi * R1) + np.abs(p.zeta / theta * R2)
    return first + second + third


def d_integrand(field: FieldState, comp: CompositeAnsatz, pert: Perturbation | None = None):
    g = comp.gas
    p = pert or perturbation(field, comp)
    a = p.ansatz
    x = field.grid.nodes
    v, theta = field.v, field.theta
    first = dissipative_group(g, v, theta, p.phi, p.zeta, a.V, a.Theta, a.Theta_x, a.U_x)
    F, G = comp.source_terms(x, field.t)
    _, Q2 = comp.q_terms(v, theta, x, field.t, values=a)
    return first + np.abs(F * p.psi) + np.abs(G * p.zeta / theta) + np.abs(Q2)


@dataclass
class EnergyReport:
    t: float = 0.0
    C0_ref: float = 0.0
    entropy_total: float = 0.0
    G_t: float = 0.0
    D_t: float = 0.0
    sup_perturbation: float = 0.0
    l2_perturbation: float = 0.0
    h1_perturbation: float = 0.0
    omega2_measure: float = 0.0
    sigma_tilde: float = 0.0


def accumulate_G(running: EnergyReport, field: FieldState, wave: ContactWave, dt: float,
                 pert: Perturbation | None = None) -> EnergyReport:
    if not dt > 0:
        raise ValueError("dt must be positive")
    inc = trapz(g_integrand(field, wave, pert), field.grid.dx) * dt
    return replace(running, G_t=running.G_t + inc)


def accumulate_D(running: EnergyReport, field: FieldState, comp: CompositeAnsatz, dt: float,
                 pert: Perturbation | None = None) -> EnergyReport:
    if not dt > 0:
        raise ValueError("dt must be positive")
    inc = trapz(d_integrand(field, comp, pert), field.grid.dx) * dt
    return replace(running, D_t=running.D_t + inc)


@dataclass
class WeightedIntegral:
    """Running sides of int int |pert|^2 w^2 <= C (1 + int int |pert_x|^2)."""

    kernel: WeightKernel
    left: float = 0.0
    right: float = 0.0

    @property
    def ratio(self) -> float:
        return self.left / (1.0 + self.right)


def weighted_square_integral(running: WeightedIntegral, field: FieldState, ansatz, dt: float,
                             pert: Perturbation | None = None) -> WeightedIntegral:
    p = pert or perturbation(field, ansatz)
    x, dx = field.grid.nodes, field.grid.dx
    w2 = running.kernel.w(x, field.t) ** 2
    comps = (p.phi, p.psi, p.zeta)
    left = trapz(sum(c ** 2 for c in comps) * w2, dx)
    right = sum(float(np.sum(np.diff(c) ** 2)) / dx for c in comps)
    return WeightedIntegral(running.kernel, running.left + left * dt, running.right + right * dt)


@dataclass(frozen=True)
class DecayVerdict:
    is_decaying: bool
    half_life: float | None


def decay_fit(t, sup) -> DecayVerdict:
    """Tail (last half) max below half the early (first 10 %) max means decaying."""
    t = np.asarray(t, dtype=float)
    sup = np.asarray(sup, dtype=float)
    if t.size != sup.size:
        raise ValueError("t and sup lengths differ")
    if t.size < 10:
        raise InsufficientSamples(f"need at least 10 samples, got {t.size}")
    lo = t[t > 0].min() if np.any(t > 0) else 0.0
    if lo <= 0 or t.max() < 10.0 * lo * (1 - 1e-12):
        raise InsufficientSamples("samples must span a decade in t")
    n = t.size
    early = float(np.max(sup[: max(1, int(math.ceil(0.1 * n)))]))
    tail = float(np.max(sup[n // 2:]))
    decaying = tail < 0.5 * early
    half_life = None
    pos = sup > 0
    if np.count_nonzero(pos) >= 2:
        slope = np.polyfit(t[pos], np.log(sup[pos]), 1)[0]
        if slope < 0:
            half_life = float(math.log(2.0) / -slope)
    return DecayVerdict(bool(decaying), half_life)


@dataclass
class EnergyMonitor:
    """Observer computing one observer-CSV record per call.

    ``ansatz`` is either a ContactWave (G accumulated) or a CompositeAnsatz
    (D accumulated).  Time integrals use the integrand stored at the previous
    call (left rectangle).
    """

    ansatz: object
    kernel: WeightKernel | None = None
    theta_ref: float | None = None
    report: EnergyReport = field(default_factory=EnergyReport)
    weighted: WeightedIntegral | None = None
    _prev: tuple | None = None

    def __post_init__(self):
        if self.kernel is not None and self.weighted is None:
            self.weighted = WeightedIntegral(self.kernel)

    def __call__(self, state: FieldState, ansatz=None) -> dict:
        a = self.ansatz
        g = a.gas
        p = perturbation(state, a)
        dx = state.grid.dx
        if self._prev is not None:
            t_prev, prev_field, prev_pert = self._prev
            dt = state.t - t_prev
            if dt > 0:
                if isinstance(a, CompositeAnsatz):
                    self.report = accumulate_D(self.report, prev_field, a, dt, prev_pert)
                else:
                    self.report = accumulate_G(self.report, prev_field, a, dt, prev_pert)
                if self.weighted is not None:
                    self.weighted = weighted_square_integral(self.weighted, prev_field, a, dt,
                                                             prev_pert)
        ent = trapz(entropy_density(g, state, p.ansatz, p.psi), dx)
        norms = perturbation_norms(state, p)
        rep = self.report
        if self._prev is None:
            rep = replace(rep, C0_ref=ent)
        self.report = replace(rep, t=state.t, entropy_total=ent,
                              sup_perturbation=norms["sup_pert"],
                              l2_perturbation=norms["l2_pert"],
                              h1_perturbation=norms["h1_pert"],
                              omega2_measure=omega_measure(state, p.ansatz.Theta),
                              sigma_tilde=sigma_tilde(state.t))
        self._prev = (state.t, state.copy(), p)
        r = self.report
        return {"entropy_total": r.entropy_total, "G_t": r.G_t, "D_t": r.D_t,
                "sup_pert": r.sup_perturbation, "l2_pert": r.l2_perturbation,
                "h1_pert": r.h1_perturbation, "omega2_measure": r.omega2_measure,
                "weighted_ratio": self.weighted.ratio if self.weighted is not None else 0.0}


OBSERVER_COLUMNS = ("t", "entropy_total", "G_t", "D_t", "sup_pert", "l2_pert", "h1_pert",
                    "omega2_measure", "weighted_ratio")
