"""Dense, small-N construction of the compatibility tensors and their
reductions.

This module is the ground truth the efficient wedge-form reduced model is
tested against: a totally antisymmetric 3-tensor xi with xi(grad S) = L and
skew factor matrices A^alpha with A^alpha grad E = m^alpha, so that the
induced 4-tensor zeta = sum_a A^a (x) A^a satisfies zeta(grad E, grad E) = M.
Dense storage is exponential in tensor degree, so everything here is gated to
small dimensions and meant for verification, never production runs.

Also hosts the finite-difference Jacobi-identity diagnostic for reduced
Poisson matrices.
"""

from dataclasses import dataclass

import numpy as np

from .errors import CompatibilityError, DegenerateIndexError, DimensionMismatchError
from .systems import MetriplecticSystem

DENSE_DIM_LIMIT = 64


@dataclass(frozen=True)
class DenseXi:
    """Totally antisymmetric 3-tensor, stored as an (N, N, N) array."""

    values: np.ndarray

    @property
    def dim(self) -> int:
        return self.values.shape[0]


@dataclass(frozen=True)
class DenseZetaFactors:
    """Skew factor stack (r, N, N); zeta is implicitly sum_a A^a (x) A^a."""

    factors: np.ndarray

    @property
    def dim(self) -> int:
        return self.factors.shape[1]


def _check_dense_dim(n):
    if n > DENSE_DIM_LIMIT:
        raise ValueError(
            f"dense tensor construction gated to N <= {DENSE_DIM_LIMIT}, got N={n}"
        )


def build_xi_dense(L: np.ndarray, grad_s: np.ndarray, k1: int, *,
                   floor: float = 1e-10, compat_tol: float = 1e-10) -> DenseXi:
    """Antisymmetrize C_ijk = L_ij [k = k1] / grad_s[k1] into the 3-tensor xi.

    Requires L skew, L grad_s = 0 within ``compat_tol`` and a nondegenerate
    pivot |grad_s[k1]| > floor.
    """
    L = np.asarray(L, dtype=float)
    grad_s = np.asarray(grad_s, dtype=float)
    n = L.shape[0]
    _check_dense_dim(n)
    if L.shape != (n, n) or grad_s.shape != (n,):
        raise DimensionMismatchError("L must be square and grad_s a matching vector")
    scale = 1.0 + np.max(np.abs(L))
    if np.max(np.abs(L + L.T)) > 1e-12 * scale:
        raise ValueError("L is not skew-symmetric")
    if abs(grad_s[k1]) <= floor:
        raise DegenerateIndexError(f"|grad_s[{k1}]| = {abs(grad_s[k1]):.3e} below floor")
    defect = np.max(np.abs(L @ grad_s))
    if defect > compat_tol * scale:
        raise CompatibilityError(f"||L grad_s||_inf = {defect:.3e} exceeds tolerance")

    C = np.zeros((n, n, n))
    C[:, :, k1] = L / grad_s[k1]
    xi = 0.5 * (
        C
        + C.transpose(1, 2, 0)
        + C.transpose(2, 0, 1)
        - C.transpose(1, 0, 2)
        - C.transpose(2, 1, 0)
        - C.transpose(0, 2, 1)
    )
    return DenseXi(xi)


def build_zeta_factors(metric_factors: np.ndarray, grad_e: np.ndarray, k0: int, *,
                       floor: float = 1e-10, compat_tol: float = 1e-10) -> DenseZetaFactors:
    """Skew factors A^a = B^a - (B^a)^T with B^a[:, k0] = m^a / grad_e[k0].

    ``metric_factors`` is the (N, r) matrix C of factor columns.  Each factor
    must satisfy m^a . grad_e = 0 within ``compat_tol``.
    """
    C = np.asarray(metric_factors, dtype=float)
    grad_e = np.asarray(grad_e, dtype=float)
    n, r = C.shape
    _check_dense_dim(n)
    if grad_e.shape != (n,):
        raise DimensionMismatchError("grad_e length must match factor rows")
    if abs(grad_e[k0]) <= floor:
        raise DegenerateIndexError(f"|grad_e[{k0}]| = {abs(grad_e[k0]):.3e} below floor")
    defects = np.abs(C.T @ grad_e)
    if np.max(defects, initial=0.0) > compat_tol:
        raise CompatibilityError(
            f"max_a |m^a . grad_e| = {np.max(defects):.3e} exceeds tolerance"
        )

    factors = np.zeros((r, n, n))
    for a in range(r):
        col = C[:, a] / grad_e[k0]
        factors[a, :, k0] += col
        factors[a, k0, :] -= col
    return DenseZetaFactors(factors)


def xi_contract(xi: DenseXi, v: np.ndarray) -> np.ndarray:
    """Matrix xi(v) with entries xi_ijk v^k."""
    return xi.values @ np.asarray(v, dtype=float)


def zeta_contract(zeta: DenseZetaFactors, u: np.ndarray) -> np.ndarray:
    """Matrix zeta(u, u) = sum_a (A^a u) (x) (A^a u)."""
    w = zeta.factors @ np.asarray(u, dtype=float)  # (r, N)
    return w.T @ w


def dense_metric(system: MetriplecticSystem, x: np.ndarray) -> np.ndarray:
    """Assemble M(x) densely from its factor list (testing only)."""
    C = system.metric_factors(np.asarray(x, dtype=float))
    return C @ C.T


def _check_orthonormal(U):
    n = U.shape[1]
    if np.max(np.abs(U.T @ U - np.eye(n))) > 1e-12:
        raise ValueError("U does not have orthonormal columns")


def reduce_dense(obj, U: np.ndarray):
    """Normal-equation reduction of a dense tensor through the basis U.

    For xi: xi_hat[a,b,c] = U_ia xi_ijk U_jb U_kc; for zeta factors:
    A_hat^a = U^T A^a U.  Both retain their defining symmetries exactly.
    """
    U = np.asarray(U, dtype=float)
    _check_orthonormal(U)
    if isinstance(obj, DenseXi):
        if obj.dim != U.shape[0]:
            raise DimensionMismatchError("basis rows do not match tensor dimension")
        return DenseXi(np.einsum("ia,ijk,jb,kc->abc", U, obj.values, U, U, optimize=True))
    if isinstance(obj, DenseZetaFactors):
        if obj.dim != U.shape[0]:
            raise DimensionMismatchError("basis rows do not match factor dimension")
        return DenseZetaFactors(np.einsum("ia,rij,jb->rab", U, obj.factors, U, optimize=True))
    raise TypeError(f"cannot reduce object of type {type(obj).__name__}")


def jacobi_residual(reduced_poisson, xhat: np.ndarray, h: float | None = None) -> float:
    """Max over index triples i<j<k of the cyclic Jacobi sum
    |sum_l L_il d_l L_jk + L_jl d_l L_ki + L_kl d_l L_ij|.

    Partial derivatives of the reduced Poisson matrix are approximated by
    central differences with step ``h`` (default 1e-5 * (1 + |xhat|_inf)).
    A nonzero residual flags that the reduced bracket fails the Jacobi
    identity, which can happen when L is state-dependent.
    """
    xhat = np.asarray(xhat, dtype=float)
    if h is None:
        h = 1e-5 * (1.0 + np.max(np.abs(xhat), initial=0.0))
    if h <= 0:
        raise ValueError("finite-difference step must be positive")
    L0 = np.asarray(reduced_poisson(xhat), dtype=float)
    n = L0.shape[0]
    if n < 3:
        return 0.0
    dL = np.empty((n, n, n))
    for l in range(n):
        step = np.zeros(n)
        step[l] = h
        dL[l] = (
            np.asarray(reduced_poisson(xhat + step), dtype=float)
            - np.asarray(reduced_poisson(xhat - step), dtype=float)
        ) / (2.0 * h)
    term = np.einsum("il,ljk->ijk", L0, dL)
    cyc = term + term.transpose(1, 2, 0) + term.transpose(2, 0, 1)
    i, j, k = np.meshgrid(np.arange(n), np.arange(n), np.arange(n), indexing="ij")
    mask = (i < j) & (j < k)
    return float(np.max(np.abs(cyc[mask])))
