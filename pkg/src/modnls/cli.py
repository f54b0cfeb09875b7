"""Command-line entry point.

Usage: ``modnls <subcommand> --config <path> [--out <dir>]``.  Each run
writes ``report.csv`` (one record per sweep point), ``summary.txt``
(verdict, fitted exponents, tolerances), and ``resolved.cfg`` (the full
configuration with defaults filled).  Exit codes: 0 on a passing verdict,
1 on a failing verdict, 2 on any error.
"""

from __future__ import annotations

import argparse
import sys
from pathlib import Path

import numpy as np

from .config import SUBCOMMANDS, ConfigError, RunConfig, parse_config, parse_initial_spec, render_config
from .evolution import EvolutionError, SolveConfig, evolve
from .experiments import (
    ExperimentError,
    run_norm_inflation,
    run_ode_approx,
    run_strichartz_probe,
)
from .reports import ExperimentReport, write_report
from .scaling import ScalingError
from .singular import SingularProbeError, run_singular_probe
from .spectral import Field, SpectralError, make_grid, sobolev_norm
from .symbols import SymbolError
from .config import _plan_from_params  # shared hypothesis checks

EXIT_PASS = 0
EXIT_FAIL = 1
EXIT_ERROR = 2

_DRIVER_ERRORS = (
    ConfigError,
    SpectralError,
    SymbolError,
    ScalingError,
    ExperimentError,
    SingularProbeError,
    EvolutionError,
)


def _run_simulate(cfg: RunConfig) -> ExperimentReport:
    p = cfg.params
    grid = make_grid(p["d"], p["n"], p["L"])
    amplitude, width = parse_initial_spec(p["initial"])
    r2 = sum(c * c for c in grid.x)
    u0 = Field(grid, amplitude * np.exp(-r2 / width**2))
    solve = SolveConfig(
        symbol=p["symbol"],
        lam=p["lambda"],
        sigma=p["sigma"],
        dt=p["dt"],
        T=p["T"],
        eps=p["eps"],
        snapshot_every=p["snapshot_every"],
        dealias=bool(p["dealias"]),
    )
    traj = evolve(u0, solve)
    rows = []
    for (t, snap), l2, tail in zip(traj.snapshots, traj.l2_norms, traj.tail_masses):
        rows.append({
            "t": t,
            "l2_norm": l2,
            "h1_norm": sobolev_norm(snap, 1.0),
            "spectral_tail_mass": tail,
        })
    drift = abs(traj.l2_norms[-1] - traj.l2_norms[0]) / traj.l2_norms[0] if traj.l2_norms[0] else 0.0
    fitted = {"l2_relative_drift": drift, "sigma_admissible": float(traj.sigma_admissible)}
    return ExperimentReport("simulate", rows, fitted, verdict=True)


def _run_inflate(cfg: RunConfig) -> ExperimentReport:
    p = cfg.params
    plan = _plan_from_params(p, p["symbol"])
    grid = make_grid(p["d"], p["grid_n"], p["grid_L"])
    return run_norm_inflation(
        plan, p["symbol"], grid, p["h_list"], lam=p["lambda"],
        rotation_budget=p["rotation_budget"], min_ratio_growth=p["min_ratio_growth"],
    )


def _run_ode_approx(cfg: RunConfig) -> ExperimentReport:
    p = cfg.params
    plan = _plan_from_params(p, p["symbol"])
    grid = make_grid(p["d"], p["grid_n"], p["grid_L"])
    return run_ode_approx(
        plan, p["symbol"], grid, p["eps_list"], p["r"], lam=p["lambda"],
        rotation_budget=p["rotation_budget"],
    )


def _run_strichartz(cfg: RunConfig) -> ExperimentReport:
    p = cfg.params
    return run_strichartz_probe(
        p["symbol"], p["p"], p["q"], p["k_grid"], p["N_list"],
        interval=(0.0, p["t_end"]), d=p["d"], box_L=p["box_L"],
        n_ceiling=p["n_ceiling"], include_contrast=bool(p["contrast"]),
    )


def _run_singular(cfg: RunConfig) -> ExperimentReport:
    p = cfg.params
    return run_singular_probe(
        p["sigma"], p["lambda"], p["t"], p["rho_list"],
        quad_tol=p["quad_tol"], delta_amp=p["amplitude"],
    )


_DRIVERS = {
    "simulate": _run_simulate,
    "inflate": _run_inflate,
    "ode-approx": _run_ode_approx,
    "strichartz": _run_strichartz,
    "singular": _run_singular,
}


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="modnls",
        description="Pseudospectral experiments for Schrodinger equations with modified dispersion",
    )
    sub = parser.add_subparsers(dest="subcommand", required=True)
    for name in SUBCOMMANDS:
        s = sub.add_parser(name)
        s.add_argument("--config", required=True, help="path to the config file")
        s.add_argument("--out", default=None, help="output directory (overrides [output] dir)")
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return EXIT_PASS if exc.code in (0, None) else EXIT_ERROR

    path = Path(args.config)
    if not path.is_file():
        print(f"error: config file not found: {path}", file=sys.stderr)
        print(parser.format_usage(), file=sys.stderr, end="")
        return EXIT_ERROR

    try:
        cfg = parse_config(args.subcommand, path.read_text())
        outdir = Path(args.out) if args.out else Path(cfg.outdir)
        report = _DRIVERS[args.subcommand](cfg)
    except _DRIVER_ERRORS as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_ERROR

    outdir.mkdir(parents=True, exist_ok=True)
    (outdir / "resolved.cfg").write_text(render_config(cfg))
    write_report(report, outdir)
    print(f"{report.kind}: {'pass' if report.verdict else 'fail'} ({outdir / 'report.csv'})")
    return EXIT_PASS if report.verdict else EXIT_FAIL


def console_main() -> None:
    sys.exit(main())


if __name__ == "__main__":
    console_main()
