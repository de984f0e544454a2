"""Experiment configuration: YAML schema, validation, emit/parse round trip.

Schema (all sections optional except ``ends``; unknown keys are rejected)::

    gas:          {R, gamma, mu, kappa, A}
    ends:         {left: {v, u, theta}, right: {v, u, theta}}
    ansatz:       contact | composite
    contact:      {Xi, n_points}
    perturbation: {kind, amplitudes: [phi, psi, zeta], width, center, seed, modes}
    grid:         {x_min, x_max, n}
    solver:       {t_end, cfl_hyperbolic, diff_number, boundary_mode}
    observer_stride: steps between observer records
    snapshot_stride: steps between snapshots (a multiple of observer_stride)
    weight_alpha: Gaussian weight rate (null: fitted from the contact profile)
    output_dir:   directory for emitted files
"""
from __future__ import annotations

from dataclasses import asdict, dataclass, field
from pathlib import Path

import yaml

from .errors import ConfigInvalid, NSWaveError
from .gas import GasParams, ThermoState
from .riemann import EndStates, is_contact_compatible, solve_intermediate_states
from .solver import Grid1D, PerturbationSpec, SolverConfig


@dataclass(frozen=True)
class ExperimentConfig:
    ends: EndStates
    gas: GasParams = field(default_factory=GasParams)
    ansatz_kind: str = "contact"
    contact_Xi: float = 20.0
    contact_n_points: int = 8001
    perturbation: PerturbationSpec = field(default_factory=PerturbationSpec)
    grid: Grid1D = field(default_factory=lambda: Grid1D(-100.0, 100.0, 4096))
    solver: SolverConfig = field(default_factory=lambda: SolverConfig(t_end=1.0))
    observer_stride: int = 100
    snapshot_stride: int = 1000
    weight_alpha: float | None = None
    output_dir: str = "out"


_SECTIONS = {
    "gas": {"R", "gamma", "mu", "kappa", "A"},
    "contact": {"Xi", "n_points"},
    "perturbation": {"kind", "amplitudes", "width", "center", "seed", "modes"},
    "grid": {"x_min", "x_max", "n"},
    "solver": {"t_end", "cfl_hyperbolic", "diff_number", "boundary_mode"},
}
_TOP = set(_SECTIONS) | {"ends", "ansatz", "observer_stride", "snapshot_stride",
                         "weight_alpha", "output_dir"}


def _section(doc, name, errors):
    sec = doc.get(name, {}) or {}
    if not isinstance(sec, dict):
        errors[name] = "must be a mapping"
        return {}
    unknown = set(sec) - _SECTIONS[name]
    if unknown:
        errors[name] = f"unknown keys {sorted(unknown)}"
    return {k: v for k, v in sec.items() if k in _SECTIONS[name]}


def _build(errors, key, fn):
    try:
        return fn()
    except (TypeError, ValueError, NSWaveError) as exc:
        errors[key] = str(exc)
        return None


def _state(doc, errors, key):
    sec = doc.get(key)
    if not isinstance(sec, dict) or set(sec) != {"v", "u", "theta"}:
        errors[f"ends.{key}"] = "needs exactly v, u, theta"
        return None
    return _build(errors, f"ends.{key}", lambda: ThermoState(float(sec["v"]), float(sec["u"]),
                                                            float(sec["theta"])))


def config_from_dict(doc: dict) -> ExperimentConfig:
    if not isinstance(doc, dict):
        raise ConfigInvalid("configuration must be a mapping")
    errors: dict = {}
    for k in sorted(set(doc) - _TOP):
        errors[k] = "unknown key"
    gas = _build(errors, "gas", lambda: GasParams(**{k: float(v) for k, v in
                                                     _section(doc, "gas", errors).items()}))
    ends_doc = doc.get("ends")
    ends = None
    if not isinstance(ends_doc, dict) or set(ends_doc) != {"left", "right"}:
        errors["ends"] = "needs exactly left and right"
    else:
        left, right = _state(ends_doc, errors, "left"), _state(ends_doc, errors, "right")
        if left is not None and right is not None:
            ends = EndStates(left, right)
    kind = doc.get("ansatz", "contact")
    if kind not in ("contact", "composite"):
        errors["ansatz"] = "must be contact or composite"
    contact = _section(doc, "contact", errors)
    pert_doc = _section(doc, "perturbation", errors)
    if "amplitudes" in pert_doc:
        pert_doc["amplitudes"] = tuple(pert_doc["amplitudes"])
    pert = _build(errors, "perturbation", lambda: PerturbationSpec(**pert_doc))
    grid_doc = _section(doc, "grid", errors)
    grid = _build(errors, "grid", lambda: Grid1D(float(grid_doc.get("x_min", -100.0)),
                                                 float(grid_doc.get("x_max", 100.0)),
                                                 grid_doc.get("n", 4096)))
    obs = doc.get("observer_stride", 100)
    snap = doc.get("snapshot_stride", 1000)
    if not isinstance(obs, int) or obs < 1:
        errors["observer_stride"] = "must be a positive integer"
    elif not isinstance(snap, int) or snap < 1 or snap % obs:
        errors["snapshot_stride"] = "must be a positive multiple of observer_stride"
    solver_doc = _section(doc, "solver", errors)
    if "t_end" not in solver_doc:
        errors["solver.t_end"] = "required"
    solver = _build(errors, "solver", lambda: SolverConfig(
        output_stride=obs if isinstance(obs, int) and obs >= 1 else 1, **solver_doc))
    alpha = doc.get("weight_alpha")
    if alpha is not None and not (isinstance(alpha, (int, float)) and alpha > 0):
        errors["weight_alpha"] = "must be positive or null"
    if gas is not None and ends is not None and not errors.get("ansatz"):
        if kind == "contact" and not is_contact_compatible(gas, ends):
            errors["ends"] = "contact ansatz needs equal velocities and pressures"
        elif kind == "composite":
            _build(errors, "ends", lambda: solve_intermediate_states(gas, ends))
    if errors:
        raise ConfigInvalid(errors)
    return ExperimentConfig(
        ends=ends, gas=gas, ansatz_kind=kind,
        contact_Xi=float(contact.get("Xi", 20.0)),
        contact_n_points=int(contact.get("n_points", 8001)),
        perturbation=pert, grid=grid, solver=solver, observer_stride=obs,
        snapshot_stride=snap, weight_alpha=None if alpha is None else float(alpha),
        output_dir=str(doc.get("output_dir", "out")))


def config_to_dict(cfg: ExperimentConfig) -> dict:
    pert = asdict(cfg.perturbation)
    pert["amplitudes"] = list(pert["amplitudes"])
    solver = asdict(cfg.solver)
    solver.pop("output_stride")
    return {
        "gas": asdict(cfg.gas),
        "ends": {"left": asdict(cfg.ends.left), "right": asdict(cfg.ends.right)},
        "ansatz": cfg.ansatz_kind,
        "contact": {"Xi": cfg.contact_Xi, "n_points": cfg.contact_n_points},
        "perturbation": pert,
        "grid": asdict(cfg.grid),
        "solver": solver,
        "observer_stride": cfg.observer_stride,
        "snapshot_stride": cfg.snapshot_stride,
        "weight_alpha": cfg.weight_alpha,
        "output_dir": cfg.output_dir,
    }


def emit(cfg: ExperimentConfig) -> str:
    return yaml.safe_dump(config_to_dict(cfg), sort_keys=False)


def parse(text: str) -> ExperimentConfig:
    try:
        doc = yaml.safe_load(text)
    except yaml.YAMLError as exc:
        raise ConfigInvalid(f"malformed YAML: {exc}") from exc
    return config_from_dict(doc)


def load(path) -> ExperimentConfig:
    return parse(Path(path).read_text())
