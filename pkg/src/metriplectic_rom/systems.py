"""Full-order metriplectic systems and their thermodynamic diagnostics.

A system is a bundle of pure evaluator functions for the energy E, entropy S,
their gradients, the skew operator L and the factors of the symmetric
positive semi-definite operator M.  The metric operator is only ever exposed
through its factor matrix C (columns m^alpha with M = C C^T); a dense view of
M exists in the oracle module for testing.
"""

from dataclasses import dataclass
from typing import Callable, Optional

import numpy as np

from .errors import DimensionMismatchError

Array = np.ndarray


def validate_state(x: Array, dim: Optional[int] = None) -> Array:
    """Return ``x`` as a float vector, rejecting NaN/Inf and wrong lengths."""
    x = np.asarray(x, dtype=float)
    if x.ndim != 1:
        raise DimensionMismatchError(f"state must be a vector, got shape {x.shape}")
    if dim is not None and x.shape[0] != dim:
        raise DimensionMismatchError(f"state has length {x.shape[0]}, expected {dim}")
    if not np.all(np.isfinite(x)):
        raise ValueError("state contains non-finite entries")
    return x


@dataclass(frozen=True)
class MetriplecticSystem:
    """Evaluator bundle for dx/dt = L(x) grad E(x) + M(x) grad S(x).

    ``metric_factors(x)`` returns the (dim, r) matrix C whose columns are the
    eigen-scaled factors m^alpha, so M = C C^T.  ``k0`` and ``k1`` are 0-based
    indices with grad E[k0] != 0 and grad S[k1] != 0 along trajectories; they
    are chosen by the system author, not searched for.

    ``poisson_apply`` / ``metric_apply`` are optional fast paths computing
    L(x) v and M(x) v without materializing dense operators.  They must agree
    with the dense definitions; the test suite cross-checks both routes.

    All evaluators must be pure and re-entrant: instances are safe to share
    across concurrent trajectory runs.
    """

    dim: int
    energy: Callable[[Array], float]
    entropy: Callable[[Array], float]
    grad_energy: Callable[[Array], Array]
    grad_entropy: Callable[[Array], Array]
    poisson_matrix: Callable[[Array], Array]
    metric_factors: Callable[[Array], Array]
    k0: int
    k1: int
    name: str = ""
    floor: float = 1e-10
    constant_poisson: bool = False
    constant_grad_entropy: bool = False
    poisson_apply: Optional[Callable[[Array, Array], Array]] = None
    metric_apply: Optional[Callable[[Array, Array], Array]] = None

    def __post_init__(self):
        if self.dim < 1:
            raise ValueError("dim must be positive")
        for k, label in ((self.k0, "k0"), (self.k1, "k1")):
            if not 0 <= k < self.dim:
                raise ValueError(f"{label}={k} outside [0, {self.dim})")

    def apply_poisson(self, x: Array, v: Array) -> Array:
        if self.poisson_apply is not None:
            return self.poisson_apply(x, v)
        return self.poisson_matrix(x) @ v

    def apply_metric(self, x: Array, v: Array) -> Array:
        if self.metric_apply is not None:
            return self.metric_apply(x, v)
        C = self.metric_factors(x)
        return C @ (C.T @ v)


@dataclass(frozen=True)
class DegeneracyReport:
    lnorm: float
    mnorm: float
    skew_defect: float
    passed: bool


def fom_rhs(system: MetriplecticSystem, x: Array) -> Array:
    """Full-order right-hand side L grad(E) + sum_a (m^a . grad S) m^a."""
    x = validate_state(x, system.dim)
    grad_e = system.grad_energy(x)
    grad_s = system.grad_entropy(x)
    rhs = system.apply_poisson(x, grad_e) + system.apply_metric(x, grad_s)
    if not np.all(np.isfinite(rhs)):
        raise ValueError("non-finite right-hand side evaluation")
    return rhs


def check_degeneracy(system: MetriplecticSystem, x: Array, tol: float = 1e-12) -> DegeneracyReport:
    """Measure the compatibility conditions L grad(S) = M grad(E) = 0 and the
    skew-symmetry of L at one state."""
    x = validate_state(x, system.dim)
    grad_e = system.grad_energy(x)
    grad_s = system.grad_entropy(x)
    L = system.poisson_matrix(x)
    lnorm = float(np.max(np.abs(L @ grad_s)))
    mnorm = float(np.max(np.abs(system.apply_metric(x, grad_e))))
    skew = float(np.max(np.abs(L + L.T)))
    return DegeneracyReport(lnorm, mnorm, skew, lnorm <= tol and mnorm <= tol and skew <= tol)


def thermo_rates(system: MetriplecticSystem, x: Array) -> tuple[float, float]:
    """Instantaneous (dE/dt, dS/dt) along the full-order flow.

    dS/dt is evaluated in Gram form sum_a (m^a . grad S)^2, which is
    nonnegative by construction.
    """
    x = validate_state(x, system.dim)
    grad_e = system.grad_energy(x)
    grad_s = system.grad_entropy(x)
    de = float(grad_e @ fom_rhs(system, x))
    C = system.metric_factors(x)
    ds = float(np.sum((C.T @ grad_s) ** 2))
    return de, ds
