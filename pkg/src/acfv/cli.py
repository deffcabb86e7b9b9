"""Command-line entry point.

Commands bind configuration files (or built-in presets) to the study
drivers and write CSV artifacts plus a run manifest into the output
directory.  Exit codes: 0 success, 1 a check failed, 2 configuration
error, 3 numerical failure.  The worker count for Monte Carlo path
blocks is taken from the ACFV_WORKERS environment variable; everything
else comes from the configuration.
"""

from __future__ import annotations

import argparse
import os
import sys
from dataclasses import replace

import numpy as np

from . import benchmark, validation
from .config import build_manifest, load_config_file, preset_config
from .errors import ConfigError, NumericalFailure
from .experiments import (StudyConfig, convergence_study, expectation_study,
                          format_float, splitting_error_study,
                          write_error_csv, write_expectation_csv, write_fit_csv)
from .linalg import ShiftedSolver
from .scheme import SchemeParams, dump_trajectory_csv, run_trajectory
from .stochastic import aggregate_increments, load_increments, sample_path
from .experiments import _setup  # shared mesh/operator construction

EXIT_OK = 0
EXIT_CHECK_FAILED = 1
EXIT_CONFIG = 2
EXIT_NUMERICAL = 3

COMMANDS = ("table-repro", "simulate", "expectation", "convergence",
            "splitting-error", "validate")


def _workers() -> int:
    raw = os.environ.get("ACFV_WORKERS", "1")
    try:
        workers = int(raw)
    except ValueError:
        raise ConfigError(f"ACFV_WORKERS must be an integer, got {raw!r}") from None
    if workers < 1:
        raise ConfigError("ACFV_WORKERS must be >= 1")
    return workers


def _resolve_config(args) -> StudyConfig:
    if args.config and args.preset:
        raise ConfigError("give either --config or --preset, not both")
    if args.config:
        config = load_config_file(args.config)
    elif args.preset:
        config = preset_config(args.command, args.preset)
    else:
        raise ConfigError("a configuration is required (--config FILE or --preset NAME)")
    if args.seed is not None:
        config = replace(config, seed=args.seed)
    if args.paths is not None:
        config = replace(config, n_paths=args.paths)
    if args.out is not None:
        config = replace(config, out_dir=args.out)
    return config.validate()


def _prepare_out(command: str, config: StudyConfig) -> str:
    manifest = build_manifest(command, config)
    os.makedirs(config.out_dir, exist_ok=True)
    with open(os.path.join(config.out_dir, "manifest.txt"), "w", encoding="ascii") as fh:
        fh.write(manifest.text())
    print(f"run {manifest.run_id} [{command}] -> {config.out_dir}")
    return config.out_dir


def cmd_table_repro(config: StudyConfig) -> int:
    path_file = config.path_file
    if path_file is None:
        raise ConfigError("table-repro needs path_file (the injected driving increments)")
    if not os.path.exists(path_file):
        raise ConfigError(f"path file not found: {path_file}")
    out_dir = _prepare_out("table-repro", config)
    report = benchmark.run_benchmark_tables(path_file)
    for name, states in report.tables.items():
        print(name)
        with open(os.path.join(out_dir, f"{name}.csv"), "w", encoding="ascii") as fh:
            fh.write("n,cell_index,value\n")
            for n, state in enumerate(states, start=1):
                print(f"  n={n}  " + "  ".join(f"{v: .8f}" for v in state))
                for k, value in enumerate(state):
                    fh.write(f"{n},{k},{value:.17g}\n")
    verdict = "PASS" if report.passed else "FAIL"
    print(f"max deviation from reference tables: {report.max_deviation:.3g} "
          f"(tolerance {benchmark.TABLE_TOLERANCE:g}) {verdict}")
    return EXIT_OK if report.passed else EXIT_CHECK_FAILED


def cmd_simulate(config: StudyConfig) -> int:
    out_dir = _prepare_out("simulate", config)
    if config.path_file is not None:
        fine = load_increments(config.path_file)
        n_fine = fine.shape[0]
    else:
        n_fine = config.resolved_n_fine()
        fine = sample_path(config.seed, 0, config.horizon, n_fine).increments
    n_steps = config.n_steps or n_fine
    if n_fine % n_steps:
        raise ConfigError(f"N={n_steps} must divide the {n_fine} fine increments")
    params = SchemeParams(horizon=config.horizon, n_steps=n_steps,
                          epsilon=config.epsilon, amplitude=config.amplitudes[0],
                          variant=config.variant)
    mesh, u0, mass, stiffness = _setup(config)
    solver = ShiftedSolver(mass, stiffness, params.tau)
    traj = run_trajectory(u0, aggregate_increments(fine, n_steps), params, solver,
                          keep_history=True)
    target = os.path.join(out_dir, "trajectory.csv")
    dump_trajectory_csv(traj, u0, target)
    print(f"wrote {target} ({n_steps} steps, variant {config.variant}, "
          f"final mean {format_float(float(np.mean(traj.final)))})")
    return EXIT_OK


def cmd_expectation(config: StudyConfig) -> int:
    out_dir = _prepare_out("expectation", config)
    results = expectation_study(config, workers=_workers())
    target = os.path.join(out_dir, "expectation.csv")
    write_expectation_csv(target, results)
    for r in results:
        print(f"a={r.amplitude:g} n={r.checkpoint} E={r.mean:.8f} drift={r.drift:.8f}")
    print(f"wrote {target}")
    return EXIT_OK


def cmd_convergence(config: StudyConfig) -> int:
    out_dir = _prepare_out("convergence", config)
    curves = convergence_study(config, workers=_workers())
    errors_target = os.path.join(out_dir, "error.csv")
    fit_target = os.path.join(out_dir, "fit.csv")
    write_error_csv(errors_target, curves)
    write_fit_csv(fit_target, curves)
    for curve in curves:
        print(f"a={curve.amplitude:g}: order m = {curve.slope:.6f}")
    print(f"wrote {errors_target} and {fit_target}")
    return EXIT_OK


def cmd_splitting_error(config: StudyConfig) -> int:
    out_dir = _prepare_out("splitting-error", config)
    curve = splitting_error_study(config, workers=_workers())
    errors_target = os.path.join(out_dir, "splitting_error.csv")
    fit_target = os.path.join(out_dir, "splitting_error_fit.csv")
    write_error_csv(errors_target, [curve])
    write_fit_csv(fit_target, [curve])
    print(f"a={curve.amplitude:g}: gap slope m = {curve.slope:.6f}")
    print(f"wrote {errors_target} and {fit_target}")
    return EXIT_OK


def cmd_validate(seed: int) -> int:
    checks = validation.run_all(seed=seed)
    for check in checks:
        print(check.line())
    failed = [c for c in checks if not c.passed]
    print(f"{len(checks) - len(failed)}/{len(checks)} checks passed")
    return EXIT_OK if not failed else EXIT_CHECK_FAILED


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="acfv",
        description="Finite-volume lab for the constrained stochastic heat flow")
    sub = parser.add_subparsers(dest="command", required=True)
    for name in COMMANDS:
        cmd = sub.add_parser(name)
        cmd.add_argument("--config", help="flat key-value configuration file")
        cmd.add_argument("--preset", choices=("desk", "paper"),
                         help="built-in configuration: desk scale or full scale")
        cmd.add_argument("--out", help="output directory (overrides out_dir)")
        cmd.add_argument("--seed", type=int, help="seed override")
        cmd.add_argument("--paths", type=int, help="path count override")
    return parser


def main(argv=None) -> int:
    args = _build_parser().parse_args(argv)
    try:
        if args.command == "validate":
            seed = args.seed if args.seed is not None else 20252
            return cmd_validate(seed)
        config = _resolve_config(args)
        handler = {
            "table-repro": cmd_table_repro,
            "simulate": cmd_simulate,
            "expectation": cmd_expectation,
            "convergence": cmd_convergence,
            "splitting-error": cmd_splitting_error,
        }[args.command]
        return handler(config)
    except ConfigError as exc:
        print(f"configuration error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except NumericalFailure as exc:
        print(f"numerical failure: {exc} (residual {exc.residual})", file=sys.stderr)
        return EXIT_NUMERICAL


if __name__ == "__main__":
    sys.exit(main())
