"""Gradient-augmented snapshot assembly and POD basis computation.

The snapshot matrix collects shifted states w = x - x0 alongside scaled
energy/entropy gradients; its thin SVD yields the reduced basis together
with the exact tail identity: the total squared projection residual of the
snapshot columns equals the sum of the squared discarded singular values.
"""

from dataclasses import dataclass
from typing import NamedTuple, Optional, Sequence

import numpy as np

from .errors import DimensionMismatchError
from .integrate import Trajectory
from .systems import MetriplecticSystem

STATE_SHIFT = "state-shift"
ENERGY_GRADIENT = "energy-gradient"
ENTROPY_GRADIENT = "entropy-gradient"


@dataclass(frozen=True)
class SnapshotMatrix:
    """Column collection Y with gradient weights and per-column provenance.

    ``provenance`` may be None for synthetic matrices assembled outside the
    training pipelines.
    """

    columns: np.ndarray  # (dim, n_cols)
    mu: float = 1.0
    nu: float = 1.0
    provenance: Optional[np.ndarray] = None

    def __post_init__(self):
        if self.columns.ndim != 2:
            raise DimensionMismatchError("snapshot columns must form a matrix")
        if self.provenance is not None and len(self.provenance) != self.columns.shape[1]:
            raise DimensionMismatchError("provenance length must match column count")

    @property
    def n_columns(self) -> int:
        return self.columns.shape[1]


@dataclass(frozen=True)
class PodBasis:
    """Leading left singular vectors plus the full positive spectrum of Y."""

    U: np.ndarray  # (dim, n), orthonormal columns
    singular_values: np.ndarray  # all positive singular values, descending
    n: int

    def __post_init__(self):
        if self.U.shape[1] != self.n:
            raise DimensionMismatchError("basis column count must equal n")

    @property
    def dim(self) -> int:
        return self.U.shape[0]

    def truncate(self, m: int) -> "PodBasis":
        """Sub-basis of the leading ``m`` modes (same spectrum)."""
        if not 1 <= m <= self.n:
            raise ValueError(f"cannot truncate rank-{self.n} basis to m={m}")
        return PodBasis(self.U[:, :m], self.singular_values, m)

    def tail_energy(self, m: Optional[int] = None) -> float:
        """Sum of squared singular values beyond mode ``m`` (default: n)."""
        m = self.n if m is None else m
        return float(np.sum(self.singular_values[m:] ** 2))


class ProjectionResidual(NamedTuple):
    residual_sq: float
    tail_sq: float
    rel_gap: float


def assemble_snapshots(trajectories: Sequence[Trajectory], system: MetriplecticSystem,
                       mu: float = 1.0, nu: float = 1.0,
                       dedupe_constant_grad_entropy: bool = True) -> SnapshotMatrix:
    """Stack per-trajectory blocks of shifted states and mu-scaled energy
    gradients; entropy gradients are nu-scaled.

    When ``dedupe_constant_grad_entropy`` is set and the system declares a
    state-independent entropy gradient, a single nu*grad(S) column is
    appended once at the very end.  Otherwise each trajectory contributes a
    third block of per-sample entropy gradients.
    """
    if not trajectories:
        raise ValueError("need at least one trajectory")
    dim = system.dim
    dedupe = dedupe_constant_grad_entropy and system.constant_grad_entropy
    blocks, tags = [], []
    for traj in trajectories:
        states = np.asarray(traj.states, dtype=float)
        if states.shape[1] != dim:
            raise DimensionMismatchError(
                f"trajectory dimension {states.shape[1]} does not match system dim {dim}"
            )
        blocks.append((states - traj.x0).T)
        tags.extend([STATE_SHIFT] * states.shape[0])
        grads_e = np.column_stack([system.grad_energy(x) for x in states])
        blocks.append(mu * grads_e)
        tags.extend([ENERGY_GRADIENT] * states.shape[0])
        if not dedupe:
            grads_s = np.column_stack([system.grad_entropy(x) for x in states])
            blocks.append(nu * grads_s)
            tags.extend([ENTROPY_GRADIENT] * states.shape[0])
    if dedupe:
        blocks.append(nu * system.grad_entropy(trajectories[0].x0)[:, None])
        tags.append(ENTROPY_GRADIENT)
    return SnapshotMatrix(np.hstack(blocks), mu=mu, nu=nu, provenance=np.array(tags))


def _fix_signs(U: np.ndarray) -> np.ndarray:
    """Deterministic sign convention: the largest-magnitude entry of each
    column is nonnegative, ties broken by lowest row index (argmax order)."""
    U = U.copy()
    idx = np.argmax(np.abs(U), axis=0)
    flip = U[idx, np.arange(U.shape[1])] < 0
    U[:, flip] *= -1.0
    return U


def compute_basis(snapshots: SnapshotMatrix, n: int) -> PodBasis:
    """Thin SVD of the snapshot matrix, retaining the first ``n`` modes.

    The SVD acts directly on Y (no Gram squaring) so small singular values
    stay accurate for the tail identity.  Raises when ``n`` exceeds the
    numerical rank (sigma_n / sigma_1 < 1e-14).
    """
    Y = snapshots.columns
    if n < 1:
        raise ValueError("n must be at least 1")
    U, s, _ = np.linalg.svd(Y, full_matrices=False)
    s = s[s > 0.0]
    if n > s.size or s[n - 1] / s[0] < 1e-14:
        raise ValueError(f"n={n} exceeds the numerical rank of the snapshot matrix")
    return PodBasis(_fix_signs(U[:, :n]), s, n)


def projection_residual(basis: PodBasis, snapshots: SnapshotMatrix) -> ProjectionResidual:
    """Measure both sides of the POD tail identity.

    residual_sq sums the squared orthogonal-complement projections of every
    snapshot column; tail_sq sums the squared singular values beyond the
    retained rank.  ``rel_gap`` is their mismatch relative to the tail (with
    a tiny floor guarding the full-rank case where the tail vanishes).
    """
    Y = snapshots.columns
    if basis.dim != Y.shape[0]:
        raise DimensionMismatchError("basis and snapshot dimensions differ")
    R = Y - basis.U @ (basis.U.T @ Y)
    residual_sq = float(np.sum(R * R))
    tail_sq = basis.tail_energy()
    total_sq = float(np.sum(basis.singular_values**2))
    # Tails below 1e-14 of the total energy are beneath the double-precision
    # resolution of the identity; the floor keeps the full-rank case from
    # dividing rounding noise by rounding noise.
    eps = 1e-14 * total_sq + 1e-300
    rel_gap = abs(residual_sq - tail_sq) / max(tail_sq, eps)
    return ProjectionResidual(residual_sq, tail_sq, rel_gap)
