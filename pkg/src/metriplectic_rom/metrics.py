"""Trajectory error metrics and thermodynamic drift measures.

The relative error is stored as a fraction; the reporting layer renders it
in percent.  Reduced trajectories must be lifted to full dimension before
being compared against a reference.
"""

from typing import Callable, NamedTuple, Optional

import numpy as np

from .errors import GridMismatchError
from .integrate import Trajectory
from .systems import MetriplecticSystem


class ErrorMetrics(NamedTuple):
    rel: float  # sqrt(sum ||x - x~||^2 / sum ||x||^2), a fraction
    max: float  # max_i ||x(t_i) - x~(t_i)||


def error_metrics(reference: Trajectory, approx: Trajectory) -> ErrorMetrics:
    """Relative l2 and maximum l2 errors over a shared time grid."""
    if reference.times.shape != approx.times.shape or not np.array_equal(
        reference.times, approx.times
    ):
        raise GridMismatchError("trajectories are sampled on different time grids")
    diff = np.linalg.norm(reference.states - approx.states, axis=1)
    ref = np.linalg.norm(reference.states, axis=1)
    rel = float(np.sqrt(np.sum(diff**2) / np.sum(ref**2)))
    return ErrorMetrics(rel, float(np.max(diff)))


def _lifted_states(trajectory: Trajectory, lift: Optional[Callable]) -> np.ndarray:
    if lift is None:
        return trajectory.states
    return np.array([lift(x) for x in trajectory.states])


def energy_drift(system: MetriplecticSystem, trajectory: Trajectory,
                 lift: Optional[Callable] = None) -> float:
    """|E(final state) - E(initial state)|, lifting reduced samples first."""
    first = trajectory.states[0] if lift is None else lift(trajectory.states[0])
    last = trajectory.states[-1] if lift is None else lift(trajectory.states[-1])
    return abs(system.energy(last) - system.energy(first))


def energy_samples(system: MetriplecticSystem, trajectory: Trajectory,
                   lift: Optional[Callable] = None) -> np.ndarray:
    return np.array([system.energy(x) for x in _lifted_states(trajectory, lift)])


def entropy_samples(system: MetriplecticSystem, trajectory: Trajectory,
                    lift: Optional[Callable] = None) -> np.ndarray:
    return np.array([system.entropy(x) for x in _lifted_states(trajectory, lift)])
