"""Experiment orchestration and CSV / metadata emission."""
from __future__ import annotations

import csv
import platform
import time
from dataclasses import asdict, dataclass
from pathlib import Path

import numpy as np
import scipy
import yaml

from . import __version__
from .composite import CompositeAnsatz
from .config import ExperimentConfig, config_to_dict
from .contact import ContactWave, fit_decay_constants
from .diagnostics import OBSERVER_COLUMNS, EnergyMonitor, WeightKernel, decay_fit
from .errors import DegenerateWave, InsufficientSamples
from .solver import FieldState, initialize, run


def fmt(x) -> str:
    return "%.17g" % float(x)


def write_csv(path, header, rows, comments=()):
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    with path.open("w", newline="") as fh:
        for line in comments:
            fh.write(f"# {line}\n")
        wr = csv.writer(fh, lineterminator="\n")
        wr.writerow(header)
        for row in rows:
            wr.writerow([fmt(v) if isinstance(v, (float, int, np.floating, np.integer))
                         and not isinstance(v, bool) else v for v in row])


def build_ansatz(cfg: ExperimentConfig):
    if cfg.ansatz_kind == "contact":
        return ContactWave.from_ends(cfg.gas, cfg.ends, cfg.contact_Xi, cfg.contact_n_points)
    return CompositeAnsatz.from_ends(cfg.gas, cfg.ends, cfg.contact_Xi, cfg.contact_n_points)


def contact_part(ansatz) -> ContactWave:
    return ansatz.contact if isinstance(ansatz, CompositeAnsatz) else ansatz


def fitted_kernel(wave: ContactWave) -> WeightKernel | None:
    """Weight kernel with alpha = c1/4 from the profile's measured Gaussian rate."""
    try:
        dc = fit_decay_constants(wave, [0.0, 1.0, 4.0, 16.0, 64.0],
                                 np.linspace(-120.0, 120.0, 2401))
    except DegenerateWave:
        return None
    return WeightKernel(dc.alpha)


@dataclass
class ExperimentResult:
    summary: dict
    records: list
    snapshots: list
    out_dir: Path


def _snapshot_rows(state: FieldState, ansatz):
    x = state.grid.nodes
    a = ansatz.evaluate(x, state.t)
    for j in range(x.size):
        yield (state.t, x[j], state.v[j], state.u[j], state.theta[j], a.V[j], a.U[j], a.Theta[j])


def run_experiment(cfg: ExperimentConfig, out_dir=None) -> ExperimentResult:
    """Run one configured simulation and write snapshots.csv, observers.csv,
    metadata.yaml and summary.yaml into the output directory."""
    out = Path(out_dir if out_dir is not None else cfg.output_dir)
    out.mkdir(parents=True, exist_ok=True)
    ansatz = build_ansatz(cfg)
    if cfg.weight_alpha is not None:
        kernel = WeightKernel(cfg.weight_alpha)
    else:
        kernel = fitted_kernel(contact_part(ansatz))
    theta_minus = cfg.ends.left.theta
    monitor = EnergyMonitor(ansatz, kernel=kernel, theta_ref=theta_minus)
    every = cfg.snapshot_stride // cfg.observer_stride
    snapshots = []
    calls = [0]

    def snapshotter(state, _ansatz):
        if calls[0] % every == 0 or state.t >= cfg.solver.t_end:
            snapshots.append(state.copy())
        calls[0] += 1
        return {}

    start = time.perf_counter()
    state = initialize(ansatz, cfg.perturbation, cfg.grid)
    traj = run(state, cfg.solver, ansatz, [monitor, snapshotter])
    wall = time.perf_counter() - start

    write_csv(out / "snapshots.csv", ("t", "x", "v", "u", "theta", "V", "U", "Theta"),
              (row for s in snapshots for row in _snapshot_rows(s, ansatz)))
    write_csv(out / "observers.csv", OBSERVER_COLUMNS,
              ([t] + [rec[c] for c in OBSERVER_COLUMNS[1:]] for t, rec in traj.records))

    ts = [t for t, _ in traj.records]
    sups = [rec["sup_pert"] for _, rec in traj.records]
    try:
        verdict = decay_fit(ts, sups)
        decaying, half_life = verdict.is_decaying, verdict.half_life
    except InsufficientSamples:
        decaying, half_life = "not evaluated", None
    rep = monitor.report
    summary = {
        "steps": traj.steps,
        "t_final": float(ts[-1]),
        "records": len(traj.records),
        "snapshots": len(snapshots),
        "C0": float(rep.C0_ref),
        "G_t": float(rep.G_t),
        "D_t": float(rep.D_t),
        "sup_pert_initial": float(sups[0]),
        "sup_pert_final": float(sups[-1]),
        "min_v": float(min(np.min(s.v) for s in snapshots)),
        "min_theta": float(min(np.min(s.theta) for s in snapshots)),
        "is_decaying": decaying,
        "half_life": None if half_life is None else float(half_life),
        "weight_alpha": None if kernel is None else float(kernel.alpha),
        "wall_seconds": round(wall, 3),
    }
    metadata = {
        "nswave_version": __version__,
        "numpy_version": np.__version__,
        "scipy_version": scipy.__version__,
        "python_version": platform.python_version(),
        "gas": asdict(cfg.gas),
        "grid": {**asdict(cfg.grid), "dx": cfg.grid.dx},
        "config": config_to_dict(cfg),
    }
    (out / "metadata.yaml").write_text(yaml.safe_dump(metadata, sort_keys=False))
    (out / "summary.yaml").write_text(yaml.safe_dump(summary, sort_keys=False))
    return ExperimentResult(summary, traj.records, snapshots, out)
