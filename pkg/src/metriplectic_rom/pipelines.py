"""Config-driven pipelines: training, comparison sweeps and FOM simulation.

These are the work functions behind the CLI subcommands; they are also used
directly by the test suite and the experiment scripts.
"""

import json
import time
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from pathlib import Path
from typing import Callable, List, Optional, Tuple

import numpy as np

from . import matio
from .benchmarks import (
    gas_sample_ics,
    gas_system,
    rod_initial_condition,
    rod_reduced_factor_map,
    rod_sample_params,
    rod_system,
)
from .config import ExperimentConfig
from .errors import SolverFailure
from .integrate import Trajectory, integrate, sample_grid
from .metrics import energy_drift, error_metrics
from .pod import PodBasis, SnapshotMatrix, assemble_snapshots, compute_basis, projection_residual
from .report import ReportRow, emit_report
from .rom import (
    RomModel,
    build_ehrom,
    build_grom,
    build_sprom,
    lift_trajectory,
)
from .systems import MetriplecticSystem, fom_rhs
from .plots import emit_plots

METHOD_LABELS = {"SP": "SP-ROM", "EH": "EH-ROM", "G": "G-ROM"}
_BUILDERS = {"SP": build_sprom, "EH": build_ehrom, "G": build_grom}


def make_system(config: ExperimentConfig) -> MetriplecticSystem:
    if config.benchmark == "gas":
        return gas_system(config.gas)
    return rod_system(config.rod)


def training_initial_states(config: ExperimentConfig) -> np.ndarray:
    """Seeded initial states for the training sweep, one row per trajectory."""
    count = config.training.num_trajectories
    if config.benchmark == "gas":
        return gas_sample_ics(config.seed, count)
    params = rod_sample_params(config.seed, count)
    return np.array([rod_initial_condition(*row, params=config.rod) for row in params])


def evaluation_initial_state(config: ExperimentConfig) -> np.ndarray:
    if config.benchmark == "gas":
        return np.asarray(config.evaluation.test_ic, dtype=float)
    return rod_initial_condition(*config.evaluation.test_params, params=config.rod)


def run_fom(config: ExperimentConfig, system: MetriplecticSystem, x0: np.ndarray,
            horizon: float) -> Trajectory:
    grid = sample_grid(horizon, config.training.sample_dt)
    return integrate(lambda y: fom_rhs(system, y), x0, grid,
                     rtol=config.integrator.rtol, atol=config.integrator.atol)


def reduced_factor_hook(config: ExperimentConfig, basis: PodBasis,
                        x0: np.ndarray) -> Optional[Callable]:
    """The rod's affine factor map; other benchmarks use the default path."""
    if config.benchmark == "rod":
        return rod_reduced_factor_map(basis.U, x0, config.rod)
    return None


def build_model(config: ExperimentConfig, system: MetriplecticSystem, basis: PodBasis,
                x0: np.ndarray, method: str, n: int) -> RomModel:
    sub = basis.truncate(n)
    builder = _BUILDERS[method]
    if method == "G":
        return builder(system, sub, x0)
    return builder(system, sub, x0, reduced_factors=reduced_factor_hook(config, sub, x0))


@dataclass
class TrainingResult:
    snapshots: SnapshotMatrix
    basis: PodBasis  # at the largest requested n
    rel_gaps: dict   # n -> projection residual gap
    trajectories: List[Trajectory]


def _artifact_paths(config: ExperimentConfig) -> dict:
    out = Path(config.output_dir)
    tag = config.benchmark
    return {
        "out": out,
        "basis": out / f"{tag}_basis.mplx",
        "sigma": out / f"{tag}_sigma.mplx",
        "summary": out / f"{tag}_train.json",
        "report": out / f"{tag}_report.csv",
        "plots": out / "plots",
    }


def run_training(config: ExperimentConfig, persist: bool = True) -> TrainingResult:
    """Integrate the training sweep, assemble snapshots, compute the basis at
    the largest requested n, and (optionally) persist U and sigma."""
    system = make_system(config)
    grid = sample_grid(config.training.horizon, config.training.sample_dt)
    trajectories = [
        integrate(lambda y: fom_rhs(system, y), ic, grid,
                  rtol=config.integrator.rtol, atol=config.integrator.atol)
        for ic in training_initial_states(config)
    ]
    snapshots = assemble_snapshots(trajectories, system,
                                   mu=config.training.mu, nu=config.training.nu)
    n_max = max(config.evaluation.n_values)
    basis = compute_basis(snapshots, n_max)
    rel_gaps = {
        n: projection_residual(basis.truncate(n), snapshots).rel_gap
        for n in sorted(config.evaluation.n_values)
    }
    if persist:
        paths = _artifact_paths(config)
        paths["out"].mkdir(parents=True, exist_ok=True)
        matio.write_matrix(paths["basis"], basis.U)
        matio.write_matrix(paths["sigma"], basis.singular_values[None, :])
        summary = {
            "benchmark": config.benchmark,
            "seed": config.seed,
            "snapshot_columns": snapshots.n_columns,
            "singular_values_leading": basis.singular_values[:10].tolist(),
            "rel_gap_by_n": {str(n): g for n, g in rel_gaps.items()},
        }
        paths["summary"].write_text(json.dumps(summary, indent=2) + "\n")
    return TrainingResult(snapshots, basis, rel_gaps, trajectories)


def load_basis(config: ExperimentConfig) -> PodBasis:
    """Load the persisted basis for this config; raises FileNotFoundError
    with a hint when training has not been run."""
    paths = _artifact_paths(config)
    if not paths["basis"].exists():
        raise FileNotFoundError(
            f"no trained basis at {paths['basis']}; run the train command first"
        )
    U = matio.read_matrix(paths["basis"])
    sigma = matio.read_matrix(paths["sigma"]).ravel()
    return PodBasis(U, sigma, U.shape[1])


def rom_label(method: str) -> str:
    return METHOD_LABELS[method]


def run_rom(config: ExperimentConfig, system: MetriplecticSystem, model: RomModel,
            horizon: float) -> Tuple[Optional[Trajectory], float, Optional[float]]:
    """Integrate one reduced model; returns (lifted trajectory or None on
    solver failure, wall seconds, last good time on failure)."""
    grid = sample_grid(horizon, config.training.sample_dt)
    started = time.perf_counter()
    try:
        reduced = integrate(model.rhs, model.initial_reduced_state(), grid,
                            rtol=config.integrator.rtol, atol=config.integrator.atol)
    except SolverFailure as failure:
        return None, time.perf_counter() - started, float(failure.last_time)
    return lift_trajectory(model, reduced), reduced.wall_time, None


def run_compare(config: ExperimentConfig, emit_csv: bool = True,
                emit_svg: bool = True, jobs: int = 1) -> List[ReportRow]:
    """Reproduce the benchmark tables: fresh FOM reference per horizon, each
    (method, n) cell integrated from xhat = 0, failures recorded as dashes.

    ``jobs`` > 1 integrates the sweep cells concurrently (models and systems
    are immutable and re-entrant); rows and plots are assembled serially in
    a fixed order, so results are independent of the worker count.
    """
    system = make_system(config)
    basis = load_basis(config)
    n_max = max(config.evaluation.n_values)
    if n_max > basis.n:
        raise FileNotFoundError(
            f"trained basis holds {basis.n} modes but n={n_max} was requested; "
            "re-run the train command with the larger n"
        )
    x0 = evaluation_initial_state(config)
    paths = _artifact_paths(config)
    rows: List[ReportRow] = []
    plot_jobs = []
    reference = None
    for horizon in config.evaluation.horizons:
        reference = run_fom(config, system, x0, horizon)
        rows.append(ReportRow("FOM", None, horizon, None, None,
                              energy_drift(system, reference),
                              reference.wall_time, True))
        cells = [(method, n) for n in config.evaluation.n_values
                 for method in config.methods]
        runner = lambda cell: run_rom(
            config, system, build_model(config, system, basis, x0, *cell), horizon
        )
        if jobs > 1:
            with ThreadPoolExecutor(max_workers=jobs) as pool:
                outcomes = list(pool.map(runner, cells))
        else:
            outcomes = [runner(cell) for cell in cells]
        by_cell = dict(zip(cells, outcomes))
        for n in config.evaluation.n_values:
            cell = [("FOM", reference)]
            for method in config.methods:
                lifted, wall, last_good = by_cell[(method, n)]
                label = rom_label(method)
                if lifted is None:
                    rows.append(ReportRow(label, n, horizon, None, None, None,
                                          wall, False, last_good_time=last_good))
                    continue
                err = error_metrics(reference, lifted)
                rows.append(ReportRow(label, n, horizon, 100.0 * err.rel, err.max,
                                      energy_drift(system, lifted), wall, True))
                cell.append((label, lifted))
            plot_jobs.append((horizon, n, cell))
    if emit_csv:
        paths["out"].mkdir(parents=True, exist_ok=True)
        paths["report"].write_text(emit_report(rows, "csv"), newline="\n")
    if emit_svg:
        mid = system.dim // 2
        phase_pair = (0, 1) if config.benchmark == "gas" else (mid // 2, mid + mid // 2)
        for horizon, n, cell in plot_jobs:
            emit_plots(system, cell,
                       ("state-component", "entropy", "energy-deviation", "phase-portrait"),
                       paths["plots"], state_index=0, phase_pair=phase_pair,
                       prefix=f"{config.benchmark}_T{horizon:g}_n{n}_")
        emit_plots(system, [("FOM", reference)], ("singular-values",), paths["plots"],
                   singular_values=basis.singular_values,
                   prefix=f"{config.benchmark}_")
    return rows


def run_simulate_fom(config: ExperimentConfig, persist: bool = True) -> Trajectory:
    """Integrate the FOM from the held-out initial condition over the longest
    requested horizon; optionally persist times/states."""
    system = make_system(config)
    x0 = evaluation_initial_state(config)
    trajectory = run_fom(config, system, x0, max(config.evaluation.horizons))
    if persist:
        paths = _artifact_paths(config)
        paths["out"].mkdir(parents=True, exist_ok=True)
        matio.write_matrix(paths["out"] / f"{config.benchmark}_fom_times.mplx",
                           trajectory.times[None, :])
        matio.write_matrix(paths["out"] / f"{config.benchmark}_fom_states.mplx",
                           trajectory.states)
    return trajectory
