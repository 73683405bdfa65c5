"""Command-line interface.

Subcommands: train, compare, verify, simulate-fom, plot.  Every command is
config-driven; the benchmark defaults reproduce the published protocols with
no extra flags.  Exit codes: 0 success, 2 invariant failure, 3 solver failure
in a required (FOM/training) run, 1 usage errors.
"""

import argparse
import dataclasses
import sys

from .config import ExperimentConfig, default_config, load_config
from .errors import SolverFailure
from .metrics import energy_drift, entropy_samples
from .pipelines import (
    load_basis,
    make_system,
    run_compare,
    run_simulate_fom,
    run_training,
)
from .report import emit_report
from .verification import run_verification

EXIT_OK = 0
EXIT_USAGE = 1
EXIT_INVARIANT_FAILURE = 2
EXIT_SOLVER_FAILURE = 3


def _add_common_flags(parser: argparse.ArgumentParser):
    parser.add_argument("--config", metavar="PATH", help="JSON config document")
    parser.add_argument("--benchmark", choices=("gas", "rod"))
    parser.add_argument("--seed", type=int)
    parser.add_argument("--out", metavar="DIR", help="output directory")
    parser.add_argument("--methods", help="comma list from SP,EH,G")
    parser.add_argument("--n", help="comma list of reduced dimensions")
    parser.add_argument("--horizons", help="comma list of evaluation horizons")
    parser.add_argument("--rtol", type=float)
    parser.add_argument("--atol", type=float)
    parser.add_argument("--jobs", type=int, default=1,
                        help="concurrent sweep cells for compare/plot (default 1)")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="metriplectic-rom",
        description="Structure-preserving reduced-order models for metriplectic systems",
    )
    sub = parser.add_subparsers(dest="command", required=True)
    for name, text in (
        ("train", "run the training sweep and persist the POD basis"),
        ("compare", "build ROMs from the trained basis and tabulate errors"),
        ("verify", "run the structural invariant suite"),
        ("simulate-fom", "integrate the full-order model from the test condition"),
        ("plot", "emit comparison SVGs without the CSV report"),
    ):
        _add_common_flags(sub.add_parser(name, help=text))
    return parser


def resolve_config(args: argparse.Namespace) -> ExperimentConfig:
    if args.config:
        config = load_config(args.config)
        if args.benchmark and args.benchmark != config.benchmark:
            raise ValueError(
                f"--benchmark {args.benchmark} conflicts with config benchmark "
                f"{config.benchmark}"
            )
    else:
        config = default_config(args.benchmark or "gas")
    updates = {}
    if args.seed is not None:
        updates["seed"] = args.seed
    if args.out is not None:
        updates["output_dir"] = args.out
    if args.methods is not None:
        updates["methods"] = tuple(m.strip().upper() for m in args.methods.split(","))
    evaluation = config.evaluation
    if args.n is not None:
        evaluation = dataclasses.replace(
            evaluation, n_values=tuple(int(v) for v in args.n.split(","))
        )
    if args.horizons is not None:
        evaluation = dataclasses.replace(
            evaluation, horizons=tuple(float(v) for v in args.horizons.split(","))
        )
    if evaluation is not config.evaluation:
        updates["evaluation"] = evaluation
    integrator = config.integrator
    if args.rtol is not None:
        integrator = dataclasses.replace(integrator, rtol=args.rtol)
    if args.atol is not None:
        integrator = dataclasses.replace(integrator, atol=args.atol)
    if integrator is not config.integrator:
        updates["integrator"] = integrator
    if updates:
        config = dataclasses.replace(config, **updates)
    return config.validate()


def _cmd_train(config: ExperimentConfig) -> int:
    try:
        result = run_training(config)
    except SolverFailure as failure:
        print(f"training solver failure: {failure}", file=sys.stderr)
        return EXIT_SOLVER_FAILURE
    print(f"snapshot matrix: {result.snapshots.n_columns} columns, "
          f"rank kept n={result.basis.n}")
    for n, gap in sorted(result.rel_gaps.items()):
        print(f"POD tail identity rel gap at n={n}: {gap:.3e}")
    print(f"basis persisted under {config.output_dir}/")
    return EXIT_OK


def _cmd_compare(config: ExperimentConfig, emit_csv: bool = True, jobs: int = 1) -> int:
    try:
        rows = run_compare(config, emit_csv=emit_csv, emit_svg=True, jobs=jobs)
    except FileNotFoundError as exc:
        print(str(exc), file=sys.stderr)
        return EXIT_USAGE
    except SolverFailure as failure:
        print(f"reference solver failure: {failure}", file=sys.stderr)
        return EXIT_SOLVER_FAILURE
    print(emit_report(rows, "aligned-table"), end="")
    if emit_csv:
        print(f"report and plots written under {config.output_dir}/")
    return EXIT_OK


def _cmd_verify(config: ExperimentConfig) -> int:
    basis = None
    try:
        basis = load_basis(config)
        print(f"checking persisted basis from {config.output_dir}/")
    except FileNotFoundError:
        print("no persisted basis found; training in-memory for verification")
    try:
        results = run_verification(config, basis=basis)
    except SolverFailure as failure:
        print(f"verification solver failure: {failure}", file=sys.stderr)
        return EXIT_SOLVER_FAILURE
    for result in results:
        print(result.line())
    return EXIT_OK if all(r.passed for r in results) else EXIT_INVARIANT_FAILURE


def _cmd_simulate_fom(config: ExperimentConfig) -> int:
    try:
        trajectory = run_simulate_fom(config)
    except SolverFailure as failure:
        print(f"FOM solver failure: {failure}", file=sys.stderr)
        return EXIT_SOLVER_FAILURE
    system = make_system(config)
    drift = energy_drift(system, trajectory)
    entropy = entropy_samples(system, trajectory)
    print(f"FOM horizon T={trajectory.times[-1]:g}: energy drift {drift:.3e}, "
          f"min entropy increment {float(min(entropy[1:] - entropy[:-1])):.3e}, "
          f"wall {trajectory.wall_time:.3g}s")
    print(f"trajectory persisted under {config.output_dir}/")
    return EXIT_OK


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        config = resolve_config(args)
    except (ValueError, FileNotFoundError) as exc:
        print(f"configuration error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    command = args.command
    if command == "train":
        return _cmd_train(config)
    if command == "compare":
        return _cmd_compare(config, jobs=max(1, args.jobs))
    if command == "verify":
        return _cmd_verify(config)
    if command == "simulate-fom":
        return _cmd_simulate_fom(config)
    if command == "plot":
        return _cmd_compare(config, emit_csv=False, jobs=max(1, args.jobs))
    raise AssertionError(f"unhandled command {command}")


if __name__ == "__main__":
    sys.exit(main())
