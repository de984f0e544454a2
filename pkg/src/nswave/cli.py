"""Command line entry point: ``nswave <subcommand> --config file.yaml --out dir``.

Exit codes: 0 success, 1 configuration error, 2 numerical failure, 3 property failure.
"""
from __future__ import annotations

import argparse
import math
import sys
from dataclasses import asdict
from pathlib import Path

import numpy as np
import yaml

from .composite import CompositeAnsatz
from .config import load
from .contact import solve_self_similar
from .errors import ConfigInvalid, NumericalFailure
from .gas import GasParams, ThermoState
from .harness import run_experiment, write_csv
from .rarefaction import BurgersWave, RarefactionWave, lp_rate_report
from .riemann import EndStates, solve_intermediate_states
from .solver import RunFailure
from .verify import verify_suite

EXIT_OK, EXIT_CONFIG, EXIT_NUMERICAL, EXIT_PROPERTY = 0, 1, 2, 3


def _read(path, allowed: set, required: set = frozenset()) -> dict:
    if path is None:
        raise ConfigInvalid("--config is required for this subcommand")
    try:
        doc = yaml.safe_load(Path(path).read_text()) or {}
    except (OSError, yaml.YAMLError) as exc:
        raise ConfigInvalid(f"cannot read {path}: {exc}") from exc
    if not isinstance(doc, dict):
        raise ConfigInvalid("configuration must be a mapping")
    errors = {k: "unknown key" for k in sorted(set(doc) - allowed)}
    errors.update({k: "required" for k in sorted(required - set(doc))})
    if errors:
        raise ConfigInvalid(errors)
    return doc


def _gas(doc) -> GasParams:
    try:
        return GasParams(**{k: float(v) for k, v in (doc.get("gas") or {}).items()})
    except (TypeError, ValueError) as exc:
        raise ConfigInvalid({"gas": str(exc)}) from exc


def _state(d, key) -> ThermoState:
    try:
        return ThermoState(float(d["v"]), float(d["u"]), float(d["theta"]))
    except (KeyError, TypeError, ValueError) as exc:
        raise ConfigInvalid({key: f"needs v, u, theta ({exc})"}) from exc


def _ends(doc) -> EndStates:
    ends = doc.get("ends") or {}
    return EndStates(_state(ends.get("left") or {}, "ends.left"),
                     _state(ends.get("right") or {}, "ends.right"))


def _lattice(doc):
    return np.linspace(float(doc.get("x_min", -50.0)), float(doc.get("x_max", 50.0)),
                       int(doc.get("n", 1001)))


def _p_value(p):
    if isinstance(p, str) and p.lower() in ("inf", "infinity"):
        return math.inf
    return float(p)


def cmd_contact_profile(args):
    doc = _read(args.config, {"gas", "theta_minus", "theta_plus", "p_plus", "Xi", "n_points", "tol"},
                {"theta_minus", "theta_plus"})
    g = _gas(doc)
    prof = solve_self_similar(g, float(doc["theta_minus"]), float(doc["theta_plus"]),
                              float(doc.get("p_plus", 1.0)), float(doc.get("Xi", 20.0)),
                              int(doc.get("n_points", 8001)), float(doc.get("tol", 1e-10)))
    comments = [f"{k}={v!r}" for k, v in asdict(g).items()]
    comments += [f"theta_minus={prof.theta_minus!r}", f"theta_plus={prof.theta_plus!r}",
                f"p_plus={prof.p_plus!r}", f"Xi={prof.Xi!r}",
                f"residual_norm={prof.residual_norm!r}",
                f"newton_iterations={prof.newton_iterations}"]
    write_csv(Path(args.out) / "contact_profile.csv", ("xi", "theta", "dtheta"),
              zip(prof.xi_grid, prof.theta_of_xi, prof.dtheta_of_xi), comments)


def cmd_rarefaction_profile(args):
    doc = _read(args.config, {"gas", "family", "anchor", "target_v", "times", "x_min", "x_max", "n"},
                {"family", "anchor", "target_v"})
    g = _gas(doc)
    try:
        wave = RarefactionWave(doc["family"], _state(doc["anchor"], "anchor"),
                               float(doc["target_v"]), g)
    except ValueError as exc:
        raise ConfigInvalid({"rarefaction": str(exc)}) from exc
    x = _lattice(doc)
    rows = []
    for t in doc.get("times", [0.0, 1.0, 10.0]):
        r = wave.evaluate(x, float(t))
        rows.extend(zip([float(t)] * x.size, x, r.w, r.V, r.U, r.Theta, r.w_x))
    write_csv(Path(args.out) / "rarefaction_profile.csv",
              ("t", "x", "w", "V", "U", "Theta", "w_x"), rows)


def cmd_burgers_rates(args):
    doc = _read(args.config, {"w_l", "w_r", "p", "times"}, {"w_l", "w_r"})
    try:
        b = BurgersWave(float(doc["w_l"]), float(doc["w_r"]))
        ps = [_p_value(p) for p in doc.get("p", [1, 2, "inf"])]
        times = [float(t) for t in doc.get("times", np.geomspace(10, 1000, 7).tolist())]
        table = lp_rate_report(b, ps, times)
    except ValueError as exc:
        raise ConfigInvalid({"burgers": str(exc)}) from exc
    write_csv(Path(args.out) / "burgers_rates.csv", ("p", "t", "norm", "slope", "expected"),
              table.rows())


def cmd_composite_profile(args):
    doc = _read(args.config, {"gas", "ends", "times", "x_min", "x_max", "n"}, {"ends"})
    g = _gas(doc)
    comp = CompositeAnsatz.from_ends(g, _ends(doc))
    x = _lattice(doc)
    rows = []
    for t in doc.get("times", [0.0, 1.0, 10.0]):
        t = float(t)
        a = comp.evaluate(x, t)
        F, G = comp.source_terms(x, t)
        rows.extend(zip([t] * x.size, x, a.V, a.U, a.Theta, F, G))
    write_csv(Path(args.out) / "composite_profile.csv", ("t", "x", "V", "U", "Theta", "F", "G"),
              rows)


def cmd_riemann_solve(args):
    doc = _read(args.config, {"gas", "ends", "tol"}, {"ends"})
    g = _gas(doc)
    d = solve_intermediate_states(g, _ends(doc), float(doc.get("tol", 1e-12)))
    cols = ("v_m_minus", "v_m_plus", "theta_m_minus", "theta_m_plus", "u_m", "p_m", "delta")
    write_csv(Path(args.out) / "riemann.csv", cols, [[getattr(d, c) for c in cols]])


def cmd_simulate(args):
    if args.config is None:
        raise ConfigInvalid("--config is required for simulate")
    try:
        cfg = load(args.config)
    except OSError as exc:
        raise ConfigInvalid(f"cannot read {args.config}: {exc}") from exc
    res = run_experiment(cfg, args.out)
    print(yaml.safe_dump(res.summary, sort_keys=False), end="")


def cmd_verify(args):
    report = verify_suite(args.level)
    for line in report.lines():
        print(line)
    if args.out:
        write_csv(Path(args.out) / "verify.csv", ("property", "passed", "detail"),
                  ((e.name, "true" if e.passed else "false", e.detail) for e in report.entries))
    return EXIT_OK if report.passed else EXIT_PROPERTY


COMMANDS = {
    "contact-profile": cmd_contact_profile,
    "rarefaction-profile": cmd_rarefaction_profile,
    "burgers-rates": cmd_burgers_rates,
    "composite-profile": cmd_composite_profile,
    "riemann-solve": cmd_riemann_solve,
    "simulate": cmd_simulate,
    "verify": cmd_verify,
}


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="nswave", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True)
    for name in COMMANDS:
        p = sub.add_parser(name)
        p.add_argument("--config", help="YAML configuration file")
        p.add_argument("--out", default=None if name in ("simulate", "verify") else ".",
                       help="output directory")
        if name == "verify":
            p.add_argument("--level", choices=("fast", "full"), default="fast")
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        code = COMMANDS[args.command](args)
    except ConfigInvalid as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except (NumericalFailure, RunFailure) as exc:
        print(f"numerical failure: {exc}", file=sys.stderr)
        return EXIT_NUMERICAL
    return code if code is not None else EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
