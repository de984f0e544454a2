"""Named property checks over every module.

``verify_suite("fast")`` runs structural invariants on small lattices;
``"full"`` adds the acceptance runs.  Each property is isolated: an exception
inside one check is recorded as that property's failure.
"""
from __future__ import annotations

import time
from dataclasses import dataclass, field

import numpy as np

from .composite import CompositeAnsatz, q1_unfactored
from .config import ExperimentConfig, emit, parse
from .contact import ContactWave
from .diagnostics import WeightKernel, sigma_tilde
from .gas import GasParams, ThermoState, entropy_of, lam, phi_kernel, pressure_of, \
    theta_on_isentrope
from .rarefaction import BurgersWave, lp_norm_wx
from .riemann import EndStates
from .solver import FieldState, Grid1D, PerturbationSpec, SolverConfig, initialize, run, step


@dataclass
class PropertyResult:
    name: str
    passed: bool
    detail: str = ""


@dataclass
class VerifyReport:
    level: str
    entries: list = field(default_factory=list)

    @property
    def passed(self) -> bool:
        return all(e.passed for e in self.entries)

    def lines(self):
        for e in self.entries:
            yield f"[{'PASS' if e.passed else 'FAIL'}] {e.name}: {e.detail}"


GAS = GasParams()


class _Constant:
    """Uniform state used as a trivial ansatz."""

    def __init__(self, g, v, u, theta):
        self.gas, self.v, self.u, self.theta = g, v, u, theta

    def evaluate(self, x, t):
        ones = np.ones_like(np.asarray(x, dtype=float))
        zeros = 0.0 * ones

        class _Vals:
            V, U, Theta = self.v * ones, self.u * ones, self.theta * ones
            V_x = U_x = Theta_x = zeros
        return _Vals


def _phi_nonnegative(ctx):
    z = np.concatenate([np.geomspace(1e-6, 1e6, 2001), ctx["rng"].uniform(1e-3, 10.0, 2000)])
    vals = np.asarray(ctx["phi"](z))
    worst = float(np.min(vals))
    return worst >= 0.0, f"min Phi {worst:.3e}"


def _phi_convex(ctx):
    z = np.linspace(0.05, 20.0, 4001)
    vals = np.asarray(ctx["phi"](z))
    second = vals[2:] - 2 * vals[1:-1] + vals[:-2]
    worst = float(np.min(second))
    return worst >= -1e-13, f"min second difference {worst:.3e}"


def _random_pairs(rng, n=2000):
    v = rng.uniform(0.3, 3.0, n)
    theta = rng.uniform(0.3, 3.0, n)
    V = rng.uniform(0.3, 3.0, n)
    Theta = rng.uniform(0.3, 3.0, n)
    return v, theta, V, Theta


def _q1_nonnegative(ctx):
    comp = ctx["composite"]()
    x = np.linspace(-30, 30, 601)
    a = comp.evaluate(x, 2.0)
    rng = ctx["rng"]
    v = a.V * rng.uniform(0.5, 2.0, x.size)
    theta = a.Theta * rng.uniform(0.5, 2.0, x.size)
    Q1, _ = comp.q_terms(v, theta, x, 2.0, values=a)
    Q1_eq, _ = comp.q_terms(a.V, a.Theta, x, 2.0, values=a)
    worst = float(np.min(Q1))
    ok = worst >= 0.0 and float(np.max(np.abs(Q1_eq))) == 0.0
    return ok, f"min Q1 {worst:.3e}, at ansatz {float(np.max(np.abs(Q1_eq))):.1e}"


def _q1_identity(ctx):
    g = GAS
    v, theta, V, Theta = _random_pairs(ctx["rng"])
    P = g.R * Theta / V
    closed = P * (phi_kernel(theta * V / (v * Theta)) + g.gamma * phi_kernel(v / V))
    err = float(np.max(np.abs(closed - q1_unfactored(g, v, theta, V, Theta))))
    return err <= 1e-10, f"max difference {err:.2e}"


def _eos_roundtrip(ctx):
    g = GAS
    v, theta, _, _ = _random_pairs(ctx["rng"])
    s = entropy_of(g, v, theta)
    err_t = float(np.max(np.abs(theta_on_isentrope(g, v, s) - theta) / theta))
    p = pressure_of(g, v, theta)
    err_p = float(np.max(np.abs(p * v / g.R - theta) / theta))
    err = max(err_t, err_p)
    return err <= 1e-12, f"max relative error {err:.2e}"


def _lambda_antisymmetry(ctx):
    v, theta, _, _ = _random_pairs(ctx["rng"])
    s = entropy_of(GAS, v, theta)
    lp, lm = lam(GAS, "plus", v, s), lam(GAS, "minus", v, s)
    ok = bool(np.all(lp == -lm) and np.all(lp > 0))
    return ok, "lambda_- == -lambda_+ exactly" if ok else "asymmetry found"


def _constant_equilibrium(ctx):
    grid = Grid1D(-10.0, 10.0, 64)
    const = _Constant(GAS, 1.0, 0.0, 1.0)
    state = FieldState(0.0, np.ones(65), np.zeros(65), np.ones(65), grid)
    out = state
    for dt in (1e-3, 1e-2, 0.3):
        out = step(out, SolverConfig(t_end=1.0), const, dt=dt)
    ok = bool(np.all(out.v == 1.0) and np.all(out.u == 0.0) and np.all(out.theta == 1.0))
    return ok, "state unchanged bit for bit" if ok else "drift from constant state"


def _small_run(seed):
    const = _Constant(GAS, 1.0, 0.0, 1.0)
    pert = PerturbationSpec("random_fourier", (0.02, 0.02, 0.02), width=4.0, seed=seed)
    grid = Grid1D(-10.0, 10.0, 128)
    traj = run(initialize(const, pert, grid), SolverConfig(t_end=0.2, output_stride=20), const,
               [lambda s, a: {"sum_u": float(np.sum(s.u)), "max_theta": float(np.max(s.theta))}])
    return traj


def _determinism(ctx):
    a, b = _small_run(7), _small_run(7)
    same = a.records == b.records and np.array_equal(a.final.theta, b.final.theta)
    return same, f"{len(a.records)} identical records" if same else "runs differ"


def _mass_identity(ctx):
    const = _Constant(GAS, 1.0, 0.0, 1.0)
    pert = PerturbationSpec("gaussian_bump", (0.0, 0.05, 0.0), width=1.0)
    grid = Grid1D(-10.0, 10.0, 256)
    state = initialize(const, pert, grid)
    worst = 0.0
    for _ in range(50):
        dt = 1e-4
        new = step(state, SolverConfig(t_end=1.0), const, dt=dt)
        # interior node sum of v changes by the central-difference boundary flux of u
        lhs = float(np.sum(new.v[1:-1] - state.v[1:-1]))
        flux = 0.5 * ((state.u[-1] + state.u[-2]) - (state.u[0] + state.u[1]))
        worst = max(worst, abs(lhs - dt / grid.dx * flux))
        state = new
    return worst <= 1e-12, f"max mismatch {worst:.2e}"


def _config_roundtrip(ctx):
    ends = EndStates(ThermoState(1.0, 0.0, 1.0), ThermoState(1.1, 0.0, 1.1))
    cfgs = [ExperimentConfig(ends=ends),
            ExperimentConfig(ends=ends, perturbation=PerturbationSpec(
                "random_fourier", (0.01, 0.02, 0.03), width=3.0, seed=11, center=0.3),
                weight_alpha=0.13, snapshot_stride=200, observer_stride=50,
                solver=SolverConfig(t_end=2.5, output_stride=50, boundary_mode="extrapolate"))]
    ok = all(parse(emit(c)) == c for c in cfgs)
    return ok, f"{len(cfgs)} configurations round trip" if ok else "mismatch"


def _weight_kernel(ctx):
    k = WeightKernel(0.137)
    worst = 0.0
    for t in (0.0, 1.0, 10.0, 100.0):
        worst = max(worst, abs(float(k.g(1e6, t)) - k.g_infinity()))
        x = np.linspace(-200, 200, 40001)
        w2 = k.w(x, t) ** 2
        quad = float(np.sum(w2) - 0.5 * (w2[0] + w2[-1])) * (x[1] - x[0])
        worst = max(worst, abs(quad - k.w_square_integral(t)))
    sig = all(sigma_tilde(t) == min(t, 1.0) for t in (0.0, 0.3, 1.0, 7.0))
    return worst <= 1e-10 and sig, f"max deviation {worst:.1e}"


def _burgers_l1(ctx):
    b = BurgersWave(-0.5, 1.0)
    err = max(abs(lp_norm_wx(b, 1.0, t) - b.strength) for t in (0.0, 5.0, 50.0))
    return err <= 1e-12, f"L1 drift {err:.1e}"


def _composite_reduction(ctx):
    ends = EndStates(ThermoState(1.0, 0.3, 1.0), ThermoState(1.1, 0.3, 1.1))
    comp = CompositeAnsatz.from_ends(GAS, ends)
    wave = ContactWave.from_ends(GAS, ends)
    x = np.linspace(-20, 20, 401)
    a, b = comp.evaluate(x, 1.5), wave.evaluate(x, 1.5)
    ok = (np.array_equal(a.V, b.V) and np.array_equal(a.Theta, b.Theta)
          and float(np.max(np.abs(a.U - b.U))) <= 1e-15)
    return ok, "zero-strength rarefactions reduce to the contact wave" if ok else "mismatch"


def _riemann_roundtrip(ctx):
    from .acceptance import random_composite
    from .riemann import solve_intermediate_states
    worst = 0.0
    for _ in range(20):
        ends, p_m, th_mm, th_mp = random_composite(ctx["rng"])
        d = solve_intermediate_states(GAS, ends)
        worst = max(worst, abs(d.p_m - p_m) / p_m, abs(d.theta_m_minus - th_mm),
                    abs(d.theta_m_plus - th_mp))
    return worst <= 1e-8, f"max middle-state error {worst:.1e}"


def _contact_scaling(ctx):
    from .contact import sup_abs_theta_derivative
    ends = EndStates(ThermoState(1.0, 0.0, 1.0), ThermoState(1.2, 0.0, 1.2))
    wave = ContactWave.from_ends(GAS, ends, n_points=4001)
    vals = [(1 + t) ** 0.5 * sup_abs_theta_derivative(wave, 1, t) for t in (0.0, 3.0, 15.0)]
    spread = float(np.ptp(vals) / np.mean(vals))
    return spread <= 1e-6, f"relative spread {spread:.1e}"


FAST_PROPERTIES = {
    "phi_nonnegativity": _phi_nonnegative,
    "phi_convexity": _phi_convex,
    "q1_nonnegative": _q1_nonnegative,
    "q1_two_form_identity": _q1_identity,
    "eos_entropy_roundtrip": _eos_roundtrip,
    "lambda_antisymmetry": _lambda_antisymmetry,
    "constant_state_equilibrium": _constant_equilibrium,
    "determinism": _determinism,
    "discrete_mass_identity": _mass_identity,
    "config_roundtrip": _config_roundtrip,
    "weight_kernel_closed_forms": _weight_kernel,
    "burgers_l1_conservation": _burgers_l1,
    "composite_contact_reduction": _composite_reduction,
    "riemann_roundtrip": _riemann_roundtrip,
    "contact_scaling": _contact_scaling,
}


def _default_composite():
    from .acceptance import composite_ends
    return CompositeAnsatz.from_ends(GAS, composite_ends(0.05))


def verify_suite(level: str = "fast", overrides: dict | None = None) -> VerifyReport:
    """Run the named properties.  ``overrides`` may replace ``phi`` (the kernel
    under test) or add/replace properties by name."""
    if level not in ("fast", "full"):
        raise ValueError("level must be 'fast' or 'full'")
    overrides = dict(overrides or {})
    cache = {}

    def composite():
        if "c" not in cache:
            cache["c"] = _default_composite()
        return cache["c"]

    ctx = {"phi": overrides.pop("phi", phi_kernel), "rng": np.random.default_rng(12345),
           "composite": composite}
    props = dict(FAST_PROPERTIES)
    props.update(overrides)
    report = VerifyReport(level)
    for name, fn in props.items():
        start = time.perf_counter()
        try:
            ok, detail = fn(ctx)
        except Exception as exc:  # a crashing property is a failing property
            ok, detail = False, f"{type(exc).__name__}: {exc}"
        report.entries.append(PropertyResult(name, bool(ok),
                                             f"{detail} ({time.perf_counter() - start:.2f} s)"))
    if level == "full":
        from .acceptance import CRITERIA
        for i, crit in CRITERIA.items():
            if i == 10:
                continue
            try:
                res = crit()
                report.entries.append(PropertyResult(f"acceptance_{i}_{res.name.replace(' ', '_')}",
                                                     res.passed, res.detail))
            except Exception as exc:
                report.entries.append(PropertyResult(f"acceptance_{i}", False,
                                                     f"{type(exc).__name__}: {exc}"))
    return report

