"""Command line front end: ``maxdirac solve | verify | sweep``.

Exit codes: 0 success, 1 configuration error, 2 solver failure,
3 diagnostics failure (or inequality violations for ``verify``).
"""

from __future__ import annotations

import argparse
import csv
import dataclasses
import json
import logging
import sys
import time
import warnings
from pathlib import Path

import numpy as np

from . import __version__
from .inequalities import SUITES, run_suite
from .solver import ConfigError, SolverConfig, SolverError, solve

SCHEMA_VERSION = 1
UNITS = "natural units: hbar = c = m_e = 1; energies in m_e c^2, lengths in reduced Compton wavelengths"

EXIT_OK, EXIT_CONFIG, EXIT_SOLVER, EXIT_DIAGNOSTICS = 0, 1, 2, 3

# config-file key -> (SolverConfig field or None, parser)
_BOOL_WORDS = {"true": True, "yes": True, "1": True, "on": True, "false": False, "no": False, "0": False, "off": False}


def _parse_bool(text: str) -> bool:
    try:
        return _BOOL_WORDS[text.strip().lower()]
    except KeyError:
        raise ValueError(f"expected a boolean, got {text!r}") from None


CONFIG_KEYS = {
    "atomic_number": ("Z", int),
    "alpha_fs": ("alpha_fs", float),
    "grid_points": ("grid_points", int),
    "box_length": ("box_length", float),
    "tol_inner": ("tol_inner", float),
    "tol_outer": ("tol_outer", float),
    "max_iter_inner": ("max_iter_inner", int),
    "max_iter_outer": ("max_iter_outer", int),
    "disable_self_field": ("disable_self_field", _parse_bool),
    "disable_external_potential": ("disable_external_potential", _parse_bool),
    "seed": ("seed", int),
    "output_path": ("output_path", str),
}


@dataclasses.dataclass(frozen=True)
class RunConfig:
    solver: SolverConfig
    output_path: str | None = None
    profile_csv: str | None = None
    history_csv: str | None = None


def read_config_file(path: str | Path) -> dict:
    """Parse flat ``key = value`` lines; ``#`` starts a comment."""
    values = {}
    text = Path(path).read_text()
    for lineno, raw in enumerate(text.splitlines(), 1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ConfigError(f"{path}:{lineno}: expected 'key = value'")
        key, value = (s.strip() for s in line.split("=", 1))
        if key not in CONFIG_KEYS:
            raise ConfigError(f"{path}:{lineno}: unknown key {key!r}; valid keys: {', '.join(CONFIG_KEYS)}")
        field_name, parse = CONFIG_KEYS[key]
        try:
            values[field_name] = parse(value)
        except ValueError as exc:
            raise ConfigError(f"{path}:{lineno}: bad value for {key}: {exc}") from None
    return values


def _add_solver_flags(p: argparse.ArgumentParser) -> None:
    p.add_argument("--config", help="flat key = value config file")
    p.add_argument("--Z", type=int, dest="Z", help="nuclear charge (atomic_number)")
    p.add_argument("--alpha", type=float, dest="alpha_fs", help="fine-structure constant")
    p.add_argument("--grid", type=int, dest="grid_points", help="grid points per axis (even)")
    p.add_argument("--box", type=float, dest="box_length", help="box edge length")
    p.add_argument("--tol-inner", type=float, dest="tol_inner")
    p.add_argument("--tol-outer", type=float, dest="tol_outer")
    p.add_argument("--max-iter-inner", type=int, dest="max_iter_inner")
    p.add_argument("--max-iter-outer", type=int, dest="max_iter_outer")
    p.add_argument("--seed", type=int)
    p.add_argument("--starts", type=int, dest="n_starts", help="number of seeded starts")
    p.add_argument("--no-self-field", action="store_const", const=True, dest="disable_self_field")
    p.add_argument("--no-external-potential", action="store_const", const=True, dest="disable_external_potential")
    p.add_argument("--output", dest="output_path", help="report path (default: stdout)")


def build_run_config(args: argparse.Namespace) -> RunConfig:
    values = read_config_file(args.config) if getattr(args, "config", None) else {}
    for name in ("Z", "alpha_fs", "grid_points", "box_length", "tol_inner", "tol_outer", "max_iter_inner",
                 "max_iter_outer", "seed", "n_starts", "disable_self_field", "disable_external_potential",
                 "output_path"):
        v = getattr(args, name, None)
        if v is not None:
            values[name] = v
    output = values.pop("output_path", None)
    cfg = SolverConfig(**values)
    with warnings.catch_warnings():
        warnings.simplefilter("ignore")
        cfg.validate()
    return RunConfig(cfg, output, getattr(args, "profile_csv", None), getattr(args, "history_csv", None))


def _clean(x):
    if isinstance(x, dict):
        return {k: _clean(v) for k, v in x.items()}
    if isinstance(x, (list, tuple)):
        return [_clean(v) for v in x]
    if isinstance(x, (np.floating,)):
        return float(x)
    if isinstance(x, (np.integer,)):
        return int(x)
    if isinstance(x, np.bool_):
        return bool(x)
    return x


def report_dict(report, run: RunConfig) -> dict:
    cfg = run.solver
    out = {"schema_version": SCHEMA_VERSION, "units": UNITS}
    out.update(report.summary())
    out["config_echo"] = {
        "atomic_number": cfg.Z,
        "alpha_fs": cfg.alpha_fs,
        "grid_points": cfg.grid_points,
        "box_length": cfg.box_length,
        "tol_inner": cfg.tol_inner,
        "tol_outer": cfg.tol_outer,
        "max_iter_inner": cfg.max_iter_inner,
        "max_iter_outer": cfg.max_iter_outer,
        "disable_self_field": cfg.disable_self_field,
        "disable_external_potential": cfg.disable_external_potential,
        "seed": cfg.seed,
        "n_starts": cfg.n_starts,
        "zero_mode": cfg.zero_mode,
        "output_path": run.output_path,
        "version": __version__,
    }
    out["best_start"] = report.start
    return _clean(out)


def radial_profiles(state, bins: int | None = None):
    """Shell averages of rho, Phi = K * rho and |J| around the nucleus."""
    from .coulomb import density_current

    grid = state.model.grid
    dc = density_current(state.psi)
    phi = state.model.kernel.convolve(dc[0])
    jabs = np.sqrt(np.sum(dc[1:] ** 2, axis=0))
    r = grid.radius.ravel()
    bins = bins or grid.n // 2
    edges = np.linspace(0.0, grid.box_length / 2, bins + 1)
    idx = np.digitize(r, edges) - 1
    rows = []
    for b in range(bins):
        sel = idx == b
        if not np.any(sel):
            continue
        rows.append((0.5 * (edges[b] + edges[b + 1]), dc[0].ravel()[sel].mean(), phi.ravel()[sel].mean(),
                     jabs.ravel()[sel].mean()))
    return rows


def _write_csv(path, header, rows):
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh)
        w.writerow(header)
        for row in rows:
            w.writerow([repr(float(v)) if isinstance(v, (float, np.floating)) else v for v in row])


def _emit(text: str, path: str | None) -> None:
    if path:
        Path(path).write_text(text)
    else:
        sys.stdout.write(text)


def cmd_solve(args) -> int:
    try:
        run = build_run_config(args)
    except (ConfigError, OSError, TypeError) as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    try:
        report = solve(run.solver)
    except SolverError as exc:
        print(f"solver failure: {exc}", file=sys.stderr)
        return EXIT_SOLVER
    _emit(json.dumps(report_dict(report, run), indent=2) + "\n", run.output_path)
    if run.profile_csv:
        _write_csv(run.profile_csv, ["r", "rho", "Phi", "J_abs"], radial_profiles(report.state))
    if run.history_csv:
        keys = ["iteration", "F", "mu", "residual_T_dual", "inner"]
        _write_csv(run.history_csv, keys, [[h[k] for k in keys] for h in report.history])
    if not report.success:
        failed = [k for k, v in report.diagnostics.items() if not v]
        print(f"diagnostics failed: {', '.join(failed)}", file=sys.stderr)
        return EXIT_DIAGNOSTICS
    return EXIT_OK


def _positive_int(text: str) -> int:
    v = int(text)
    if v < 1:
        raise argparse.ArgumentTypeError(f"must be a positive integer, got {text}")
    return v


def cmd_verify(args) -> int:
    names = args.suite or list(SUITES)
    reports = run_suite(names, args.trials, args.seed)
    for r in reports:
        status = "ok" if r.passed else "FAIL"
        print(f"{r.name:12s} trials={r.trials:6d} worst_ratio={float(r.worst_ratio):.6g} "
              f"violations={r.violations} slack={r.slack:g} {status}")
    if args.output:
        doc = {"schema_version": SCHEMA_VERSION, "trials": args.trials, "seed": args.seed,
               "suites": [_clean(r.as_dict()) for r in reports]}
        Path(args.output).write_text(json.dumps(doc, indent=2) + "\n")
    return EXIT_OK if all(r.passed for r in reports) else EXIT_DIAGNOSTICS


SWEEP_PARAMS = {"Z": ("Z", int), "box": ("box_length", float), "grid": ("grid_points", int)}
SWEEP_COLUMNS = ["param", "value", "mu", "lambda_W", "residual_EL", "residual_T_dual", "wall_time"]


def cmd_sweep(args) -> int:
    field_name, conv = SWEEP_PARAMS[args.param]
    try:
        values = [conv(v) for v in args.values]
        run = build_run_config(args)
        configs = [dataclasses.replace(run.solver, **{field_name: v}) for v in values]
        with warnings.catch_warnings():
            warnings.simplefilter("ignore")
            for c in configs:
                c.validate()
    except (ConfigError, OSError, TypeError, ValueError) as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    rows = []
    status = EXIT_OK
    for v, c in zip(values, configs):
        t0 = time.perf_counter()
        try:
            rep = solve(c)
        except SolverError as exc:
            print(f"solver failure at {args.param}={v}: {exc}", file=sys.stderr)
            rows.append([args.param, v, "", "", "", "", time.perf_counter() - t0])
            status = EXIT_SOLVER
            continue
        rows.append([args.param, v, rep.mu, rep.lambda_W, rep.residual_EL, rep.residual_T_dual,
                     time.perf_counter() - t0])
    if run.output_path:
        _write_csv(run.output_path, SWEEP_COLUMNS, rows)
    else:
        w = csv.writer(sys.stdout)
        w.writerow(SWEEP_COLUMNS)
        w.writerows(rows)
    return status


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="maxdirac", description="Maxwell-Dirac-Coulomb ground states on a periodic box")
    p.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    p.add_argument("-v", "--verbose", action="store_true", help="log solver progress to stderr")
    sub = p.add_subparsers(dest="command", required=True)

    ps = sub.add_parser("solve", help="compute the ground state and write a JSON report")
    _add_solver_flags(ps)
    ps.add_argument("--profile-csv", help="write radially averaged rho, Phi, |J|")
    ps.add_argument("--history-csv", help="write the outer convergence history")
    ps.set_defaults(func=cmd_solve)

    pv = sub.add_parser("verify", help="run the inequality suite")
    pv.add_argument("--trials", type=_positive_int, default=1000)
    pv.add_argument("--seed", type=int, default=0)
    pv.add_argument("--suite", action="append", choices=list(SUITES), help="restrict to a suite (repeatable)")
    pv.add_argument("--output", help="JSON report path")
    pv.set_defaults(func=cmd_verify)

    pw = sub.add_parser("sweep", help="solve over a list of parameter values, CSV output")
    pw.add_argument("--param", required=True, choices=list(SWEEP_PARAMS))
    pw.add_argument("--values", required=True, nargs="+")
    _add_solver_flags(pw)
    pw.set_defaults(func=cmd_sweep)
    return p


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.DEBUG if args.verbose else logging.WARNING,
                        format="%(levelname)s %(name)s: %(message)s")
    return args.func(args)


if __name__ == "__main__":
    sys.exit(main())
