"""End-to-end acceptance checks, shared by ``verify --level full`` and the test suite.

Each ``criterion_N`` returns a :class:`CriterionResult` with the measured
quantities; none of them raise on a failed check.
"""
from __future__ import annotations

import functools
import math
import time
from dataclasses import dataclass, field

import numpy as np

from .composite import CompositeAnsatz
from .contact import ContactWave, fit_decay_constants, residuals, solve_self_similar, \
    sup_abs_theta_derivative
from .diagnostics import EnergyMonitor, WeightKernel, decay_fit, trapz
from .gas import GasParams, ThermoState, entropy, pressure
from .oracles import curve_velocity_by_quadrature, time_marched_contact_profile
from .rarefaction import BurgersWave, lp_norm_wx, lp_rate_report
from .riemann import EndStates, composite_from_middle, solve_intermediate_states
from .solver import Grid1D, PerturbationSpec, SolverConfig, initialize, run


@dataclass
class CriterionResult:
    number: int
    name: str
    passed: bool
    detail: str
    metrics: dict = field(default_factory=dict)

    def line(self) -> str:
        return f"[{'PASS' if self.passed else 'FAIL'}] criterion {self.number} {self.name}: {self.detail}"


GAS = GasParams()


def criterion_1() -> CriterionResult:
    start = time.perf_counter()
    prof = solve_self_similar(GAS, 1.0, 1.2, 1.0, 20.0, 8001, 1e-10)
    elapsed = time.perf_counter() - start
    boundary = max(abs(prof.theta_of_xi[0] - 1.0), abs(prof.theta_of_xi[-1] - 1.2))
    xi_o, th_o = time_marched_contact_profile(GAS, 1.0, 1.2, 1.0)
    sel = np.abs(xi_o) <= 15.0
    th, _ = prof.theta_and_derivative(xi_o[sel])
    oracle_err = float(np.max(np.abs(th - th_o[sel])))
    ok = prof.residual_norm <= 1e-10 and boundary <= 1e-8 and oracle_err <= 1e-4 and elapsed <= 30
    return CriterionResult(1, "contact profile", ok,
                           f"residual {prof.residual_norm:.2e}, boundary {boundary:.2e}, "
                           f"oracle {oracle_err:.2e}, {elapsed:.1f} s",
                           {"residual": prof.residual_norm, "boundary": boundary,
                            "oracle_error": oracle_err, "seconds": elapsed})


def _contact(theta_plus, theta_minus=1.0):
    ends = EndStates(ThermoState(theta_minus, 0.0, theta_minus),
                     ThermoState(theta_plus, 0.0, theta_plus))
    return ContactWave.from_ends(GAS, ends)


def criterion_2() -> CriterionResult:
    w = _contact(1.2)
    times = (0.0, 3.0, 15.0, 99.0)
    first = [math.sqrt(1 + t) * sup_abs_theta_derivative(w, 1, t) for t in times]
    second = [(1 + t) * sup_abs_theta_derivative(w, 2, t) for t in times]
    spread = max(np.ptp(first) / np.mean(first), np.ptp(second) / np.mean(second))
    return CriterionResult(2, "self-similar scaling", spread <= 1e-6,
                           f"relative spread {spread:.2e}",
                           {"first": first, "second": second, "spread": spread})


def _residual_constant(w: ContactWave, c1: float, times, xs) -> float:
    delta = w.profile.strength
    worst = 0.0
    for t in times:
        R1, _ = residuals(w, xs, t)
        nz = R1 != 0
        # log form: the Gaussian underflows far out where R1 is exactly zero
        log_ratio = (np.log(np.abs(R1[nz])) + 1.5 * math.log1p(t) - math.log(delta)
                     + c1 * xs[nz] ** 2 / (1 + t))
        if log_ratio.size:
            worst = max(worst, float(np.exp(np.max(log_ratio))))
    return worst


def criterion_3() -> CriterionResult:
    times = np.concatenate([[0.0], np.geomspace(0.1, 100.0, 16)])
    xs = np.linspace(-60.0, 60.0, 2401)
    consts, c1s = [], []
    for th in (1.1, 1.2):
        w = _contact(th)
        dc = fit_decay_constants(w, times, np.linspace(-120.0, 120.0, 2401))
        c1s.append(dc.c1)
        consts.append(_residual_constant(w, dc.c1, times, xs))
    finite = all(math.isfinite(c) for c in consts)
    rel = abs(consts[0] - consts[1]) / max(consts)
    ok = finite and rel <= 0.2
    return CriterionResult(3, "residual bound shape", ok,
                           f"constants {consts[0]:.4g} / {consts[1]:.4g} (rel diff {rel:.3f}), "
                           f"c1 {c1s[0]:.4f} / {c1s[1]:.4f}",
                           {"constants": consts, "c1": c1s, "relative_difference": rel})


def criterion_4() -> CriterionResult:
    start = time.perf_counter()
    b = BurgersWave(-1.0, 1.0)
    table = lp_rate_report(b, (2.0, math.inf), np.geomspace(10.0, 1000.0, 7))
    l1 = max(abs(lp_norm_wx(b, 1.0, t) - b.strength) for t in (10.0, 100.0, 1000.0))
    elapsed = time.perf_counter() - start
    errs = {p: abs(table.slopes[p] - table.expected[p]) for p in table.slopes}
    ok = max(errs.values()) <= 0.1 and l1 <= 1e-12 and elapsed <= 10
    return CriterionResult(4, "Burgers rates", ok,
                           f"slopes p=2 {table.slopes[2.0]:.3f}, p=inf {table.slopes[math.inf]:.3f}, "
                           f"L1 drift {l1:.1e}, {elapsed:.1f} s",
                           {"slopes": table.slopes, "l1_drift": l1, "seconds": elapsed})


def random_composite(rng: np.random.Generator, g: GasParams = GAS, max_delta: float = 0.3):
    """Forward-built R1-C-R3 pair; returns (ends, p_m, theta_m_minus, theta_m_plus)."""
    v_l, th_l = rng.uniform(0.5, 2.0), rng.uniform(0.5, 2.0)
    left = ThermoState(v_l, rng.uniform(-1.0, 1.0), th_l)
    p_l = g.R * th_l / v_l
    p_m = p_l * rng.uniform(0.85, 0.99)
    th_mm = th_l * (p_m / p_l) ** ((g.gamma - 1) / g.gamma)
    th_mp = th_mm + rng.uniform(-0.5, 0.5) * max_delta
    p_r = p_m * rng.uniform(1.01, 1.15)
    ends = composite_from_middle(g, left, p_m, th_mp, p_r)
    return ends, p_m, th_mm, th_mp


def criterion_5(n_cases: int = 100, seed: int = 20240601) -> CriterionResult:
    rng = np.random.default_rng(seed)
    worst_state, worst_match, worst_oracle = 0.0, 0.0, 0.0
    done = 0
    while done < n_cases:
        ends, p_m, th_mm, th_mp = random_composite(rng)
        if abs(ends.right.theta - ends.left.theta) > 0.3:
            continue
        done += 1
        d = solve_intermediate_states(GAS, ends)
        worst_state = max(worst_state, abs(d.p_m - p_m) / p_m, abs(d.theta_m_minus - th_mm),
                          abs(d.theta_m_plus - th_mp))
        mm, mp = d.middle_minus(), d.middle_plus()
        worst_match = max(worst_match,
                          abs(pressure(GAS, mm) - pressure(GAS, mp)),
                          abs(entropy(GAS, mm) - entropy(GAS, ends.left)),
                          abs(entropy(GAS, mp) - entropy(GAS, ends.right)))
        u_quad = curve_velocity_by_quadrature(GAS, -1, ends.left.v, ends.left.theta,
                                              ends.left.u, d.v_m_minus)
        worst_oracle = max(worst_oracle, abs(u_quad - d.u_m))
    ok = worst_state <= 1e-8 and worst_oracle <= 1e-8 and worst_match <= 1e-9
    return CriterionResult(5, "Riemann round trip", ok,
                           f"state error {worst_state:.1e}, quadrature u_m error {worst_oracle:.1e}, "
                           f"matching {worst_match:.1e}",
                           {"state_error": worst_state, "matching": worst_match,
                            "oracle": worst_oracle})


def convergence_study(ns=(1024, 2048, 4096), t_end: float = 1.0):
    w = _contact(1.1)
    pert = PerturbationSpec("gaussian_bump", (0.0, 0.05, 0.0), width=5.0)
    sols = []
    for n in ns:
        grid = Grid1D(-100.0, 100.0, n)
        traj = run(initialize(w, pert, grid), SolverConfig(t_end=t_end, output_stride=10 ** 9), w)
        sols.append(traj.final)
    diffs = []
    for coarse, fine in zip(sols, sols[1:]):
        dx = coarse.grid.dx
        sq = sum((getattr(fine, f)[::2] - getattr(coarse, f)) ** 2 for f in ("v", "u", "theta"))
        diffs.append(math.sqrt(trapz(sq, dx)))
    return diffs


def criterion_6() -> CriterionResult:
    start = time.perf_counter()
    diffs = convergence_study()
    elapsed = time.perf_counter() - start
    factor = diffs[0] / diffs[1]
    ok = factor >= 3.6 and elapsed <= 300
    return CriterionResult(6, "solver convergence", ok,
                           f"L2 differences {diffs[0]:.3e}, {diffs[1]:.3e}; factor {factor:.2f} "
                           f"(order {math.log2(factor):.2f}), {elapsed:.0f} s",
                           {"diffs": diffs, "factor": factor, "seconds": elapsed})


@dataclass
class LongRun:
    times: list
    records: list
    C0: float
    G_t: float
    D_t: float
    min_v: float
    min_theta: float
    min_v0: float
    min_theta0: float
    seconds: float
    source_constant: float = float("nan")
    source_series: list = field(default_factory=list)
    source_tail: list = field(default_factory=list)


def _long_run(ansatz, kernel, t_end=200.0, n=4096, stride=500, source_times=()):
    grid = Grid1D(-100.0, 100.0, n)
    pert = PerturbationSpec("gaussian_bump", (0.05, 0.05, 0.05), width=5.0)
    monitor = EnergyMonitor(ansatz, kernel=kernel)
    mins = {"v": math.inf, "theta": math.inf}

    def bounds(state, _a):
        mins["v"] = min(mins["v"], float(np.min(state.v)))
        mins["theta"] = min(mins["theta"], float(np.min(state.theta)))
        return {}

    start = time.perf_counter()
    state0 = initialize(ansatz, pert, grid)
    traj = run(state0, SolverConfig(t_end=t_end, output_stride=stride), ansatz, [monitor, bounds])
    seconds = time.perf_counter() - start
    return LongRun([t for t, _ in traj.records], [r for _, r in traj.records],
                   monitor.report.C0_ref, monitor.report.G_t, monitor.report.D_t,
                   mins["v"], mins["theta"], float(np.min(state0.v)),
                   float(np.min(state0.theta)), seconds)


@functools.lru_cache(maxsize=None)
def contact_run(theta_plus: float = 1.1, t_end: float = 200.0) -> LongRun:
    w = _contact(theta_plus)
    dc = fit_decay_constants(w, [0.0, 1.0, 4.0, 16.0, 64.0], np.linspace(-120, 120, 2401))
    return _long_run(w, WeightKernel(dc.alpha), t_end)


def _decay_checks(r: LongRun):
    sups = [rec["sup_pert"] for rec in r.records]
    verdict = decay_fit(r.times, sups)
    halved = sups[-1] <= 0.5 * sups[0]
    bounded = r.min_v >= 0.5 * r.min_v0 and r.min_theta >= 0.5 * r.min_theta0
    return sups, verdict, halved, bounded


def criterion_7() -> CriterionResult:
    r = contact_run()
    sups, verdict, halved, bounded = _decay_checks(r)
    ok = halved and verdict.is_decaying and bounded and r.seconds <= 1200
    return CriterionResult(7, "contact decay", ok,
                           f"sup {sups[0]:.3e} -> {sups[-1]:.3e}, decaying {verdict.is_decaying}, "
                           f"min v {r.min_v:.3f}, min theta {r.min_theta:.3f}, {r.seconds:.0f} s",
                           {"sup_initial": sups[0], "sup_final": sups[-1],
                            "is_decaying": verdict.is_decaying, "seconds": r.seconds})


def criterion_8() -> CriterionResult:
    r = contact_run()
    G_max = max(rec["G_t"] for rec in r.records)
    ok = G_max <= r.C0
    detail = f"delta 0.1: max G {G_max:.4e} vs C0 {r.C0:.4e}"
    metrics = {"G_max": G_max, "C0": r.C0}
    if not ok:
        r2 = contact_run(1.05)
        G2 = max(rec["G_t"] for rec in r2.records)
        ok = G2 <= r2.C0
        detail += f"; delta 0.05: max G {G2:.4e} vs C0 {r2.C0:.4e}"
        metrics.update(G_max_fallback=G2, C0_fallback=r2.C0)
    return CriterionResult(8, "G(t) monitor", ok, detail, metrics)


def composite_ends(strength: float = 0.05, g: GasParams = GAS) -> EndStates:
    """R1-C-R3 pair from (1, 0, 1) with rarefaction pressure ratios 1 -+ ~strength
    and contact temperature jump ``strength``."""
    left = ThermoState(1.0, 0.0, 1.0)
    p_l = pressure(g, left)
    p_m = p_l * (1.0 - strength)
    th_mm = left.theta * (p_m / p_l) ** ((g.gamma - 1) / g.gamma)
    return composite_from_middle(g, left, p_m, th_mm + strength, p_m / (1.0 - strength))


def source_window(comp: CompositeAnsatz, t: float, n: int = 8193) -> np.ndarray:
    """Lattice that follows both fans and the diffusing contact layer."""
    pad = 60.0 + 8.0 * math.sqrt(1.0 + t)
    lo = min(comp.rare_minus.burgers.w_l, 0.0) * t - pad
    hi = max(comp.rare_plus.burgers.w_r, 0.0) * t + pad
    return np.linspace(lo, hi, n)


def source_constant(comp: CompositeAnsatz, times) -> tuple[float, list]:
    """max over ``times`` of (1+t)^(7/8) ||(F, G)(t)||_L1, with the series."""
    series = []
    for t in times:
        x = source_window(comp, t)
        F, G = comp.source_terms(x, t)
        series.append(float((1 + t) ** 0.875 * trapz(np.abs(F) + np.abs(G), x[1] - x[0])))
    return max(series), series


@functools.lru_cache(maxsize=None)
def composite_run(strength: float = 0.05, t_end: float = 200.0) -> LongRun:
    comp = CompositeAnsatz.from_ends(GAS, composite_ends(strength))
    dc = fit_decay_constants(comp.contact, [0.0, 1.0, 4.0, 16.0, 64.0],
                             np.linspace(-120, 120, 2401))
    r = _long_run(comp, WeightKernel(dc.alpha), t_end)
    times = np.concatenate([[0.0], np.geomspace(0.1, t_end, 24)])
    r.source_constant, r.source_series = source_constant(comp, times)
    # The source terms depend on the ansatz alone, so they can be followed past
    # the run to see whether the in-run maximum still bounds them.
    r.source_tail = source_constant(comp, np.geomspace(t_end, 10 * t_end, 8)[1:])[1]
    return r


def criterion_9() -> CriterionResult:
    r = composite_run()
    sups, verdict, halved, bounded = _decay_checks(r)
    D_max = max(rec["D_t"] for rec in r.records)
    d_ok = D_max <= r.C0
    detail = f"sup {sups[0]:.3e} -> {sups[-1]:.3e}, max D {D_max:.4e} vs C0 {r.C0:.4e}"
    if not d_ok:
        r2 = composite_run(0.025)
        D2 = max(rec["D_t"] for rec in r2.records)
        d_ok = D2 <= r2.C0
        detail += f"; fallback max D {D2:.4e} vs C0 {r2.C0:.4e}"
    # bounded: followed to 10 T the series turns over and then falls monotonically
    full = list(r.source_series) + list(r.source_tail)
    peak = int(np.argmax(full))
    K = full[peak]
    src_ok = (math.isfinite(K) and peak < len(full) - 2
              and all(b < a for a, b in zip(full[peak:], full[peak + 1:])))
    ok = halved and verdict.is_decaying and bounded and d_ok and src_ok and r.seconds <= 1800
    detail += (f", decaying {verdict.is_decaying}, (1+t)^(7/8)|(F,G)|_1 <= {K:.3f} "
               f"(in-run max {r.source_constant:.3f}, falling after the peak: {src_ok}), "
               f"{r.seconds:.0f} s")
    return CriterionResult(9, "composite decay", ok, detail,
                           {"sup_initial": sups[0], "sup_final": sups[-1], "D_max": D_max,
                            "C0": r.C0, "source_constant": K,
                            "source_in_run": r.source_constant, "d_ok": d_ok,
                            "source_ok": src_ok, "seconds": r.seconds})


def criterion_10() -> CriterionResult:
    from .verify import verify_suite

    start = time.perf_counter()
    report = verify_suite("fast")
    elapsed = time.perf_counter() - start
    failed = [e.name for e in report.entries if not e.passed]
    ok = not failed and elapsed <= 60
    return CriterionResult(10, "structural identities", ok,
                           f"{len(report.entries) - len(failed)}/{len(report.entries)} properties, "
                           f"{elapsed:.1f} s" + (f", failed {failed}" if failed else ""),
                           {"seconds": elapsed, "failed": failed})


CRITERIA = {i: globals()[f"criterion_{i}"] for i in range(1, 11)}
