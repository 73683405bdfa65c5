"""The three reduced-order models over a shared POD basis.

* G:  plain Galerkin projection of the full right-hand side.
* EH: projected operators L_bar = U^T L U and M_bar = (U^T C)(U^T C)^T, so
      the reduced Poisson matrix stays skew and the metric stays PSD, but
      the degeneracy conditions are only approximate.
* SP: the structure-preserving model built from wedge products
      xi_hat = L_bar ^ s_hat and A_hat^a = a_hat^a ^ U_k0, which enforces
      reduced energy conservation and entropy production exactly.

All reduced states integrate from xhat = 0, i.e. the lifted trajectory
starts at the reference state x0.
"""

import json
from dataclasses import dataclass
from pathlib import Path
from typing import Callable, Optional

import numpy as np

from . import matio
from .errors import DegenerateIndexError, DimensionMismatchError
from .integrate import Trajectory
from .pod import PodBasis
from .systems import MetriplecticSystem, fom_rhs

GALERKIN = "G"
PROJECTED_OPERATORS = "EH"
STRUCTURE_PRESERVING = "SP"
VARIANTS = (STRUCTURE_PRESERVING, PROJECTED_OPERATORS, GALERKIN)


@dataclass(frozen=True)
class RomModel:
    """One reduced model: variant tag, basis, reference state and hooks.

    ``reduced_factors(xhat, x_tilde)`` returns the (n, r) matrix of reduced
    metric factors U^T C; the default lifts and projects, benchmarks may
    register a cheaper equivalent (the rod's affine map ignores x_tilde).
    Instances are immutable and safe to integrate concurrently.
    """

    variant: str
    basis: PodBasis
    x0: np.ndarray
    system: MetriplecticSystem
    L_bar: Optional[np.ndarray] = None
    row_k0: Optional[np.ndarray] = None
    row_k1: Optional[np.ndarray] = None
    reduced_factors: Optional[Callable] = None

    @property
    def n(self) -> int:
        return self.basis.n

    def initial_reduced_state(self) -> np.ndarray:
        return np.zeros(self.n)

    def rhs(self, xhat: np.ndarray) -> np.ndarray:
        return _RHS_DISPATCH[self.variant](self, np.asarray(xhat, dtype=float))


def lift(model: RomModel, xhat: np.ndarray) -> np.ndarray:
    """Full-order reconstruction x0 + U xhat."""
    xhat = np.asarray(xhat, dtype=float)
    if xhat.shape != (model.n,):
        raise DimensionMismatchError(f"reduced state must have length {model.n}")
    return model.x0 + model.basis.U @ xhat


def lift_trajectory(model: RomModel, traj: Trajectory) -> Trajectory:
    """Lift every sample of a reduced trajectory to full dimension."""
    states = traj.states @ model.basis.U.T + model.x0
    return Trajectory(traj.times.copy(), states, wall_time=traj.wall_time)


def _validate_build(system: MetriplecticSystem, basis: PodBasis, x0: np.ndarray):
    x0 = np.asarray(x0, dtype=float)
    if basis.dim != system.dim or x0.shape != (system.dim,):
        raise DimensionMismatchError("basis/x0 dimensions do not match the system")
    return x0


def _projected_poisson(system: MetriplecticSystem, U: np.ndarray, x: np.ndarray) -> np.ndarray:
    if system.poisson_apply is not None:
        LU = np.column_stack([system.poisson_apply(x, u) for u in U.T])
        return U.T @ LU
    return U.T @ system.poisson_matrix(x) @ U


def _default_reduced_factors(system: MetriplecticSystem, basis: PodBasis, x0: np.ndarray):
    U = basis.U

    def reduced_factors(xhat, x_tilde=None):
        if x_tilde is None:
            x_tilde = x0 + U @ xhat
        return U.T @ system.metric_factors(x_tilde)

    return reduced_factors


def build_grom(system: MetriplecticSystem, basis: PodBasis, x0: np.ndarray) -> RomModel:
    """Naive Galerkin projection U^T [L grad E + M grad S] at the lift."""
    x0 = _validate_build(system, basis, x0)
    return RomModel(GALERKIN, basis, x0, system)


def build_ehrom(system: MetriplecticSystem, basis: PodBasis, x0: np.ndarray,
                reduced_factors: Optional[Callable] = None) -> RomModel:
    """Projected-operator model with skew L_bar and PSD factor-form M_bar."""
    x0 = _validate_build(system, basis, x0)
    L_bar = _projected_poisson(system, basis.U, x0) if system.constant_poisson else None
    if reduced_factors is None:
        reduced_factors = _default_reduced_factors(system, basis, x0)
    return RomModel(PROJECTED_OPERATORS, basis, x0, system,
                    L_bar=L_bar, reduced_factors=reduced_factors)


def build_sprom(system: MetriplecticSystem, basis: PodBasis, x0: np.ndarray,
                reduced_factors: Optional[Callable] = None) -> RomModel:
    """Structure-preserving model; stores the k0/k1 basis rows and, when L is
    state-independent, the precomputed L_bar."""
    x0 = _validate_build(system, basis, x0)
    _pivots(system, x0)  # the distinguished components must be alive at x0
    L_bar = _projected_poisson(system, basis.U, x0) if system.constant_poisson else None
    if reduced_factors is None:
        reduced_factors = _default_reduced_factors(system, basis, x0)
    return RomModel(STRUCTURE_PRESERVING, basis, x0, system,
                    L_bar=L_bar,
                    row_k0=basis.U[system.k0].copy(),
                    row_k1=basis.U[system.k1].copy(),
                    reduced_factors=reduced_factors)


def _pivots(system: MetriplecticSystem, x_tilde: np.ndarray,
            grad_e: Optional[np.ndarray] = None,
            grad_s: Optional[np.ndarray] = None) -> tuple[float, float]:
    if grad_e is None:
        grad_e = system.grad_energy(x_tilde)
    if grad_s is None:
        grad_s = system.grad_entropy(x_tilde)
    e_k0 = float(grad_e[system.k0])
    s_k1 = float(grad_s[system.k1])
    if abs(e_k0) <= system.floor:
        raise DegenerateIndexError(f"|grad_E[{system.k0}]| = {abs(e_k0):.3e} below floor")
    if abs(s_k1) <= system.floor:
        raise DegenerateIndexError(f"|grad_S[{system.k1}]| = {abs(s_k1):.3e} below floor")
    return e_k0, s_k1


def _grom_rhs(model: RomModel, xhat: np.ndarray) -> np.ndarray:
    x_tilde = model.x0 + model.basis.U @ xhat
    return model.basis.U.T @ fom_rhs(model.system, x_tilde)


def _ehrom_rhs(model: RomModel, xhat: np.ndarray) -> np.ndarray:
    sys_, U = model.system, model.basis.U
    x_tilde = model.x0 + U @ xhat
    ge_hat = U.T @ sys_.grad_energy(x_tilde)
    gs_hat = U.T @ sys_.grad_entropy(x_tilde)
    L_bar = model.L_bar if model.L_bar is not None else _projected_poisson(sys_, U, x_tilde)
    A = model.reduced_factors(xhat, x_tilde)
    return L_bar @ ge_hat + A @ (A.T @ gs_hat)


def _sprom_parts(model: RomModel, xhat: np.ndarray):
    """Shared evaluation core for the SP right-hand side and its rates."""
    sys_, U = model.system, model.basis.U
    x_tilde = model.x0 + U @ xhat
    grad_e = sys_.grad_energy(x_tilde)
    grad_s = sys_.grad_entropy(x_tilde)
    e_k0, s_k1 = _pivots(sys_, x_tilde, grad_e, grad_s)
    ge_hat = U.T @ grad_e
    gs_hat = U.T @ grad_s
    s_hat = model.row_k1 / s_k1
    L_bar = model.L_bar if model.L_bar is not None else _projected_poisson(sys_, U, x_tilde)
    L_gs = L_bar @ gs_hat
    L_ge = L_bar @ ge_hat
    reversible = (
        (ge_hat @ L_gs) * s_hat - (s_hat @ ge_hat) * L_gs + (s_hat @ gs_hat) * L_ge
    )
    a_hat = model.reduced_factors(xhat, x_tilde) / e_k0  # (n, r)
    # A_hat^a grad_E = c a_hat^a - d_a U_k0 with c, d as below.
    c = float(ge_hat @ model.row_k0)
    d = a_hat.T @ ge_hat
    w = c * (a_hat.T @ gs_hat) - d * float(model.row_k0 @ gs_hat)
    dissipative = c * (a_hat @ w) - float(w @ d) * model.row_k0
    return ge_hat, gs_hat, reversible, dissipative, w


def _sprom_rhs(model: RomModel, xhat: np.ndarray) -> np.ndarray:
    _, _, reversible, dissipative, _ = _sprom_parts(model, xhat)
    return reversible + dissipative


_RHS_DISPATCH = {
    GALERKIN: _grom_rhs,
    PROJECTED_OPERATORS: _ehrom_rhs,
    STRUCTURE_PRESERVING: _sprom_rhs,
}


def sprom_rhs(model: RomModel, xhat: np.ndarray) -> np.ndarray:
    """Explicit wedge-form right-hand side of the structure-preserving model:

        (gE . L_bar gS) s_hat - (s_hat . gE) L_bar gS + (s_hat . gS) L_bar gE
        + sum_a (A_hat^a gE . gS) A_hat^a gE

    with all hatted quantities evaluated at the lift x0 + U xhat and the
    factor products expanded through the wedge identity, never as matrices.
    """
    if model.variant != STRUCTURE_PRESERVING:
        raise ValueError(f"sprom_rhs requires an SP model, got variant {model.variant!r}")
    return _sprom_rhs(model, np.asarray(xhat, dtype=float))


def reduced_rates(model: RomModel, xhat: np.ndarray) -> tuple[float, float]:
    """Reduced (dE/dt, dS/dt) along the model's flow.

    For the SP variant the entropy rate is the Gram sum
    sum_a (A_hat^a gE . gS)^2 >= 0; for the other variants both rates are
    plain dot products with the right-hand side.
    """
    xhat = np.asarray(xhat, dtype=float)
    if model.variant == STRUCTURE_PRESERVING:
        ge_hat, gs_hat, reversible, dissipative, w = _sprom_parts(model, xhat)
        de = float(ge_hat @ (reversible + dissipative))
        return de, float(w @ w)
    sys_, U = model.system, model.basis.U
    x_tilde = model.x0 + U @ xhat
    rhs = model.rhs(xhat)
    return float((U.T @ sys_.grad_energy(x_tilde)) @ rhs), float(
        (U.T @ sys_.grad_entropy(x_tilde)) @ rhs
    )


def reduced_poisson_matrix(model: RomModel, xhat: np.ndarray) -> np.ndarray:
    """Reduced Poisson matrix L_hat = xi_hat(grad S_hat) of an SP model,
    assembled densely for diagnostics (the Jacobi residual)."""
    if model.variant != STRUCTURE_PRESERVING:
        raise ValueError("reduced Poisson matrix is defined for SP models")
    sys_, U = model.system, model.basis.U
    xhat = np.asarray(xhat, dtype=float)
    x_tilde = model.x0 + U @ xhat
    grad_s = sys_.grad_entropy(x_tilde)
    _, s_k1 = _pivots(sys_, x_tilde, grad_s=grad_s)
    gs_hat = U.T @ grad_s
    s_hat = model.row_k1 / s_k1
    L_bar = model.L_bar if model.L_bar is not None else _projected_poisson(sys_, U, x_tilde)
    L_gs = L_bar @ gs_hat
    return float(s_hat @ gs_hat) * L_bar + np.outer(s_hat, L_gs) - np.outer(L_gs, s_hat)


def save_model(model: RomModel, directory) -> Path:
    """Persist variant tag, basis, spectrum and reference state."""
    directory = Path(directory)
    directory.mkdir(parents=True, exist_ok=True)
    matio.write_matrix(directory / "basis.mplx", model.basis.U)
    matio.write_matrix(directory / "sigma.mplx", model.basis.singular_values[None, :])
    matio.write_matrix(directory / "x0.mplx", model.x0[:, None])
    meta = {"variant": model.variant, "n": model.n, "system": model.system.name,
            "dim": model.system.dim}
    (directory / "model.json").write_text(json.dumps(meta, indent=2) + "\n")
    return directory


def load_model(directory, system: MetriplecticSystem,
               reduced_factors: Optional[Callable] = None) -> RomModel:
    """Rebuild a persisted model against the matching system."""
    directory = Path(directory)
    meta = json.loads((directory / "model.json").read_text())
    if meta["system"] != system.name or meta["dim"] != system.dim:
        raise ValueError(
            f"model was saved for system {meta['system']!r} (dim {meta['dim']}), "
            f"got {system.name!r} (dim {system.dim})"
        )
    U = matio.read_matrix(directory / "basis.mplx")
    sigma = matio.read_matrix(directory / "sigma.mplx").ravel()
    x0 = matio.read_matrix(directory / "x0.mplx").ravel()
    basis = PodBasis(U, sigma, U.shape[1])
    builders = {GALERKIN: build_grom, PROJECTED_OPERATORS: build_ehrom,
                STRUCTURE_PRESERVING: build_sprom}
    builder = builders[meta["variant"]]
    if meta["variant"] == GALERKIN:
        return builder(system, basis, x0)
    return builder(system, basis, x0, reduced_factors=reduced_factors)
