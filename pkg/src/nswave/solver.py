"""Explicit finite-difference solver for the Lagrangian Navier-Stokes system.

    v_t = u_x
    u_t + p_x = mu (u_x / v)_x
    c_nu theta_t + p u_x = (kappa theta_x / v)_x + mu u_x^2 / v,    p = R theta / v

Nodes x_0 .. x_n on a uniform grid.  Interior nodes use central differences
with viscous and heat fluxes at half nodes; boundary nodes are pinned to the
ansatz or extrapolated.  Time stepping is the three-stage SSP Runge-Kutta
scheme of Shu and Osher.
"""
from __future__ import annotations

import math
import time
from dataclasses import dataclass, field, replace
from typing import Callable, Literal, Protocol

import numpy as np

from .errors import BlowUp, PositivityViolation
from .gas import GasParams

DT_FLOOR = 1e-12


class AnsatzProfile(Protocol):
    gas: GasParams

    def evaluate(self, x, t: float): ...


@dataclass(frozen=True)
class Grid1D:
    x_min: float
    x_max: float
    n: int

    def __post_init__(self):
        if int(self.n) != self.n or self.n < 16:
            raise ValueError("grid needs at least 16 cells")
        if not (math.isfinite(self.x_min) and math.isfinite(self.x_max)) or self.x_max <= self.x_min:
            raise ValueError("need finite x_min < x_max")

    @property
    def dx(self) -> float:
        return (self.x_max - self.x_min) / self.n

    @property
    def nodes(self) -> np.ndarray:
        return self.x_min + self.dx * np.arange(self.n + 1)


@dataclass
class FieldState:
    t: float
    v: np.ndarray
    u: np.ndarray
    theta: np.ndarray
    grid: Grid1D

    def copy(self) -> "FieldState":
        return FieldState(self.t, self.v.copy(), self.u.copy(), self.theta.copy(), self.grid)


PerturbationKind = Literal["gaussian_bump", "compact_cosine", "random_fourier"]


@dataclass(frozen=True)
class PerturbationSpec:
    """Perturbation (phi0, psi0, zeta0) added to the ansatz at t = 0.

    ``gaussian_bump``: a * exp(-((x - center)/width)^2).
    ``compact_cosine``: a * cos^2(pi (x - center) / (2 width)) on |x - center| < width.
    ``random_fourier``: a * (sum of ``modes`` random sines, normalised to unit sup)
    times the compact cosine window, drawn from ``seed``.
    """

    kind: PerturbationKind = "gaussian_bump"
    amplitudes: tuple[float, float, float] = (0.0, 0.0, 0.0)
    width: float = 5.0
    center: float = 0.0
    seed: int = 0
    modes: int = 8

    def __post_init__(self):
        if self.kind not in ("gaussian_bump", "compact_cosine", "random_fourier"):
            raise ValueError(f"unknown perturbation kind {self.kind!r}")
        if len(self.amplitudes) != 3 or not all(math.isfinite(a) for a in self.amplitudes):
            raise ValueError("amplitudes must be three finite numbers")
        if not self.width > 0:
            raise ValueError("width must be positive")
        object.__setattr__(self, "amplitudes", tuple(float(a) for a in self.amplitudes))

    def shape(self, x: np.ndarray) -> np.ndarray:
        z = (np.asarray(x, dtype=float) - self.center) / self.width
        if self.kind == "gaussian_bump":
            return np.exp(-z * z)
        window = np.where(np.abs(z) < 1.0, np.cos(0.5 * np.pi * z) ** 2, 0.0)
        if self.kind == "compact_cosine":
            return window
        rng = np.random.default_rng(self.seed)
        k = rng.uniform(0.5, 4.0, self.modes)
        phase = rng.uniform(0.0, 2 * np.pi, self.modes)
        coef = rng.normal(size=self.modes)
        series = np.sin(np.outer(z, k) + phase) @ coef
        peak = np.max(np.abs(series)) if series.size else 1.0
        return window * series / (peak if peak > 0 else 1.0)

    def fields(self, x: np.ndarray):
        s = self.shape(x)
        a_phi, a_psi, a_zeta = self.amplitudes
        return a_phi * s, a_psi * s, a_zeta * s


@dataclass(frozen=True)
class SolverConfig:
    t_end: float
    cfl_hyperbolic: float = 0.4
    diff_number: float = 0.25
    output_stride: int = 100
    boundary_mode: Literal["pin_to_ansatz", "extrapolate"] = "pin_to_ansatz"

    def __post_init__(self):
        if not (math.isfinite(self.t_end) and self.t_end >= 0):
            raise ValueError("t_end must be finite and non-negative")
        if not 0 < self.cfl_hyperbolic <= 1:
            raise ValueError("cfl_hyperbolic must lie in (0, 1]")
        if not 0 < self.diff_number <= 0.5:
            raise ValueError("diff_number must lie in (0, 0.5]")
        if int(self.output_stride) != self.output_stride or self.output_stride < 1:
            raise ValueError("output_stride must be a positive integer")
        if self.boundary_mode not in ("pin_to_ansatz", "extrapolate"):
            raise ValueError(f"unknown boundary mode {self.boundary_mode!r}")


def _check_positive(v, theta, t, dt=None):
    for name, arr in (("v", v), ("theta", theta)):
        j = int(np.argmin(arr))
        if not arr[j] > 0:
            if not np.all(np.isfinite(arr)):
                raise BlowUp(f"non-finite {name} at t={t}")
            raise PositivityViolation(
                f"{name} lost positivity at node {j}, t={t:.6g} (value {arr[j]:.3e})",
                field=name, node=j, margin=float(arr[j]), t=t,
                suggested_dt=None if dt is None else 0.5 * dt)


def initialize(ansatz: AnsatzProfile, pert: PerturbationSpec, grid: Grid1D) -> FieldState:
    x = grid.nodes
    a = ansatz.evaluate(x, 0.0)
    phi, psi, zeta = pert.fields(x)
    v = np.asarray(a.V, dtype=float) + phi
    u = np.asarray(a.U, dtype=float) + psi
    theta = np.asarray(a.Theta, dtype=float) + zeta
    _check_positive(v, theta, 0.0)
    return FieldState(0.0, v, u, theta, grid)


def rhs(g: GasParams, v, u, theta, dx: float):
    """Time derivatives at interior nodes 1..n-1."""
    p = g.R * theta / v
    inv2dx = 0.5 / dx
    u_x = (u[2:] - u[:-2]) * inv2dx
    v_mid = 0.5 * (v[1:] + v[:-1])
    visc = g.mu * np.diff(u) / (dx * v_mid)
    heat = g.kappa * np.diff(theta) / (dx * v_mid)
    vc = v[1:-1]
    dv = u_x
    du = -(p[2:] - p[:-2]) * inv2dx + np.diff(visc) / dx
    dtheta = (-p[1:-1] * u_x + np.diff(heat) / dx + g.mu * u_x * u_x / vc) / g.c_nu
    return dv, du, dtheta


def stable_dt(g: GasParams, state: FieldState, cfg: SolverConfig) -> float:
    dx = state.grid.dx
    c = np.sqrt(g.gamma * g.R * state.theta) / state.v
    dt_hyp = cfg.cfl_hyperbolic * dx / float(np.max(c))
    diffusivity = float(np.max(np.maximum(g.mu, g.kappa / g.c_nu) / state.v))
    dt_visc = cfg.diff_number * dx * dx / diffusivity
    return min(dt_hyp, dt_visc)


class _Boundary:
    """Applies the boundary rule at a given stage time; caches ansatz edge values."""

    def __init__(self, ansatz: AnsatzProfile, grid: Grid1D, mode: str):
        self.ansatz = ansatz
        self.mode = mode
        self.edges = np.array([grid.x_min, grid.x_max])
        self._cache: dict = {}

    def edge_values(self, t: float):
        hit = self._cache.get(t)
        if hit is None:
            a = self.ansatz.evaluate(self.edges, t)
            hit = (np.asarray(a.V, float), np.asarray(a.U, float), np.asarray(a.Theta, float))
            if len(self._cache) > 8:
                self._cache.clear()
            self._cache[t] = hit
        return hit

    def apply(self, v, u, theta, t: float):
        if self.mode == "pin_to_ansatz":
            V, U, T = self.edge_values(t)
            v[0], v[-1] = V
            u[0], u[-1] = U
            theta[0], theta[-1] = T
        else:
            for f in (v, u, theta):
                f[0] = 2.0 * f[1] - f[2]
                f[-1] = 2.0 * f[-2] - f[-3]


def _stage(g, v, u, theta, dx, dt):
    dv, du, dth = rhs(g, v, u, theta, dx)
    v1, u1, th1 = v.copy(), u.copy(), theta.copy()
    v1[1:-1] += dt * dv
    u1[1:-1] += dt * du
    th1[1:-1] += dt * dth
    return v1, u1, th1


def step(state: FieldState, cfg: SolverConfig, ansatz: AnsatzProfile, dt: float | None = None,
         boundary: _Boundary | None = None) -> FieldState:
    """One SSP-RK3 step; ``dt`` defaults to the stability limit."""
    g = ansatz.gas
    if dt is None:
        dt = stable_dt(g, state, cfg)
    if not (math.isfinite(dt) and dt >= DT_FLOOR):
        raise BlowUp(f"time step {dt!r} below floor at t={state.t}")
    bc = boundary or _Boundary(ansatz, state.grid, cfg.boundary_mode)
    dx = state.grid.dx
    t0 = state.t
    v0, u0, th0 = state.v, state.u, state.theta

    v1, u1, th1 = _stage(g, v0, u0, th0, dx, dt)
    bc.apply(v1, u1, th1, t0 + dt)
    _check_positive(v1, th1, t0 + dt, dt)

    v2, u2, th2 = _stage(g, v1, u1, th1, dx, dt)
    v2 = 0.75 * v0 + 0.25 * v2
    u2 = 0.75 * u0 + 0.25 * u2
    th2 = 0.75 * th0 + 0.25 * th2
    bc.apply(v2, u2, th2, t0 + 0.5 * dt)
    _check_positive(v2, th2, t0 + 0.5 * dt, dt)

    v3, u3, th3 = _stage(g, v2, u2, th2, dx, dt)
    v3 = v0 / 3.0 + 2.0 / 3.0 * v3
    u3 = u0 / 3.0 + 2.0 / 3.0 * u3
    th3 = th0 / 3.0 + 2.0 / 3.0 * th3
    t1 = t0 + dt
    bc.apply(v3, u3, th3, t1)
    if not (np.all(np.isfinite(v3)) and np.all(np.isfinite(u3)) and np.all(np.isfinite(th3))):
        raise BlowUp(f"non-finite values after step at t={t1}")
    _check_positive(v3, th3, t1, dt)
    return FieldState(t1, v3, u3, th3, state.grid)


Observer = Callable[[FieldState, AnsatzProfile], dict]


@dataclass
class Trajectory:
    records: list = field(default_factory=list)      # (t, {observer outputs})
    snapshots: list = field(default_factory=list)    # FieldState at requested times
    steps: int = 0
    wall_time: float = 0.0


class RunFailure(Exception):
    """Wraps a step error with the step count and wall time at failure."""

    def __init__(self, cause: Exception, steps: int, wall_time: float, t: float):
        super().__init__(f"{type(cause).__name__} after {steps} steps "
                         f"({wall_time:.1f} s wall, t={t:.6g}): {cause}")
        self.cause, self.steps, self.wall_time, self.t = cause, steps, wall_time, t


def _observe(observers, state, ansatz):
    rec = {}
    for obs in observers:
        rec.update(obs(state, ansatz))
    return (state.t, rec)


def run(state: FieldState, cfg: SolverConfig, ansatz: AnsatzProfile,
        observers: list[Observer] = (), snapshot_times=()) -> Trajectory:
    """Advance to ``cfg.t_end``; observers fire at the start, every
    ``output_stride`` steps, and at the end.  Snapshots are taken at the
    requested times, which are hit exactly by shortening the step."""
    traj = Trajectory()
    pending = sorted(float(s) for s in snapshot_times if state.t <= s <= cfg.t_end)
    bc = _Boundary(ansatz, state.grid, cfg.boundary_mode)
    traj.records.append(_observe(observers, state, ansatz))
    while pending and pending[0] <= state.t:
        traj.snapshots.append(state.copy())
        pending.pop(0)
    start = time.perf_counter()
    steps_since = 0
    tol = 1e-12 * max(1.0, cfg.t_end)
    while cfg.t_end - state.t > tol:
        dt = stable_dt(ansatz.gas, state, cfg)
        target = pending[0] if pending else cfg.t_end
        if state.t + dt >= target - tol:
            dt = target - state.t
        try:
            state = step(state, cfg, ansatz, dt, bc)
        except Exception as exc:
            raise RunFailure(exc, traj.steps, time.perf_counter() - start, state.t) from exc
        if pending and abs(state.t - pending[0]) <= tol:
            state = replace(state, t=pending[0])
            traj.snapshots.append(state.copy())
            pending.pop(0)
        traj.steps += 1
        steps_since += 1
        at_end = cfg.t_end - state.t <= tol
        if steps_since == cfg.output_stride or at_end:
            traj.records.append(_observe(observers, state, ansatz))
            steps_since = 0
    traj.wall_time = time.perf_counter() - start
    traj.final = state
    return traj
