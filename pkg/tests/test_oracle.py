import numpy as np
import numpy.testing as npt
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from metriplectic_rom import (
    CompatibilityError,
    DegenerateIndexError,
    build_xi_dense,
    build_zeta_factors,
    dense_metric,
    jacobi_residual,
    reduce_dense,
    xi_contract,
    zeta_contract,
)
from metriplectic_rom.oracle import DenseXi, DenseZetaFactors

from conftest import random_gas_states


def random_compatible_pair(seed, n=5):
    """Random skew L with L @ s = 0: project a random skew matrix onto the
    orthogonal complement of a random direction s."""
    rng = np.random.default_rng(seed)
    s = rng.standard_normal(n)
    s /= np.linalg.norm(s)
    A = rng.standard_normal((n, n))
    L = A - A.T
    P = np.eye(n) - np.outer(s, s)
    return P @ L @ P, s


def test_xi_levi_civita_example():
    L = np.array([[0.0, 1.0, 0.0], [-1.0, 0.0, 0.0], [0.0, 0.0, 0.0]])
    s = np.array([0.0, 0.0, 1.0])
    xi = build_xi_dense(L, s, k1=2)
    # xi_123 = (C_123 - C_213)/2 = 1 with full Levi-Civita antisymmetry
    expect = np.zeros((3, 3, 3))
    for (i, j, k), sign in (
        ((0, 1, 2), 1), ((1, 2, 0), 1), ((2, 0, 1), 1),
        ((1, 0, 2), -1), ((2, 1, 0), -1), ((0, 2, 1), -1),
    ):
        expect[i, j, k] = sign
    npt.assert_allclose(xi.values, expect, atol=1e-15)
    npt.assert_allclose(xi_contract(xi, s), L, atol=1e-15)


@settings(max_examples=25, deadline=None)
@given(st.integers(0, 10_000))
def test_xi_total_antisymmetry_and_contraction(seed):
    L, s = random_compatible_pair(seed)
    k1 = int(np.argmax(np.abs(s)))
    xi = build_xi_dense(L, s, k1).values
    npt.assert_allclose(xi, -xi.transpose(1, 0, 2), atol=1e-13)
    npt.assert_allclose(xi, -xi.transpose(0, 2, 1), atol=1e-13)
    npt.assert_allclose(np.einsum("ijk,k->ij", xi, s), L, atol=1e-12)


def test_xi_repeated_indices_vanish():
    L, s = random_compatible_pair(1)
    xi = build_xi_dense(L, s, int(np.argmax(np.abs(s)))).values
    n = L.shape[0]
    for i in range(n):
        npt.assert_allclose(xi[i, i, :], 0.0, atol=1e-14)
        npt.assert_allclose(xi[:, i, i], 0.0, atol=1e-14)
        npt.assert_allclose(xi[i, :, i], 0.0, atol=1e-14)


def test_xi_preconditions():
    L, s = random_compatible_pair(2)
    with pytest.raises(DegenerateIndexError):
        build_xi_dense(L, s, k1=int(np.argmin(np.abs(s))), floor=np.max(np.abs(s)))
    L_bad = L.copy()
    L_bad[0, 1] += 0.1  # breaks skewness
    with pytest.raises(ValueError):
        build_xi_dense(L_bad, s, int(np.argmax(np.abs(s))))
    rng = np.random.default_rng(0)
    skew = rng.standard_normal((5, 5))
    skew = skew - skew.T  # skew but L s != 0
    with pytest.raises(CompatibilityError):
        build_xi_dense(skew, s, int(np.argmax(np.abs(s))))


def test_dense_dimension_gate():
    n = 80
    L = np.zeros((n, n))
    with pytest.raises(ValueError, match="gated"):
        build_xi_dense(L, np.ones(n), 0)


def test_zeta_gas_reproduces_metric(gas):
    for x in random_gas_states(30, seed=41):
        grad_e = gas.grad_energy(x)
        zf = build_zeta_factors(gas.metric_factors(x), grad_e, gas.k0)
        M = dense_metric(gas, x)
        scale = 1.0 + np.max(np.abs(M))
        assert np.max(np.abs(zeta_contract(zf, grad_e) - M)) <= 1e-11 * scale
        for A in zf.factors:
            assert np.max(np.abs(A + A.T)) <= 1e-13


def test_zeta_small_example_exact():
    # m . grad_e = p - p = 0 exactly, so A grad_e reproduces m exactly
    p, v = 0.7, -1.3
    m = np.sqrt(8.0) * np.array([0.0, 1.0, -p])
    grad_e = np.array([v, p, 1.0])
    zf = build_zeta_factors(m[:, None], grad_e, k0=2)
    npt.assert_array_equal(zf.factors[0] @ grad_e, m)


def test_zeta_zero_factor():
    zf = build_zeta_factors(np.zeros((4, 1)), np.array([0.0, 0.0, 1.0, 1.0]), k0=2)
    npt.assert_array_equal(zf.factors[0], np.zeros((4, 4)))


def test_zeta_preconditions():
    grad_e = np.array([1.0, 0.0, 1e-14])
    with pytest.raises(DegenerateIndexError):
        build_zeta_factors(np.zeros((3, 1)), grad_e, k0=2)
    with pytest.raises(CompatibilityError):
        build_zeta_factors(np.array([[1.0], [0.0], [0.0]]), np.array([1.0, 0.0, 1.0]), k0=2)


def test_reduce_identity_basis():
    L, s = random_compatible_pair(5)
    xi = build_xi_dense(L, s, int(np.argmax(np.abs(s))))
    reduced = reduce_dense(xi, np.eye(5))
    npt.assert_allclose(reduced.values, xi.values, atol=1e-14)


def test_reduce_requires_orthonormal_columns():
    xi = DenseXi(np.zeros((3, 3, 3)))
    with pytest.raises(ValueError, match="orthonormal"):
        reduce_dense(xi, np.array([[1.0, 0.0], [1.0, 0.0], [0.0, 1.0]]))
    with pytest.raises(TypeError):
        reduce_dense(np.zeros((3, 3, 3)), np.eye(3))


def test_reduced_tensors_keep_symmetries(gas, tiny_gas_training):
    U = tiny_gas_training.basis.truncate(2).U
    x = np.array([0.9, -0.4, 2.4, 2.0])
    xi = reduce_dense(build_xi_dense(gas.poisson_matrix(x), gas.grad_entropy(x), gas.k1), U)
    v = xi.values
    npt.assert_allclose(v, -v.transpose(1, 0, 2), atol=1e-13)
    npt.assert_allclose(v, -v.transpose(0, 2, 1), atol=1e-13)
    zf = reduce_dense(
        build_zeta_factors(gas.metric_factors(x), gas.grad_energy(x), gas.k0), U
    )
    for A in zf.factors:
        npt.assert_allclose(A, -A.T, atol=1e-13)


def test_fom_rewrite_identity(gas):
    """xi(gS) gE + zeta(gE, gE) gS reproduces L gE + M gS."""
    for x in random_gas_states(100, seed=43):
        grad_e = gas.grad_energy(x)
        grad_s = gas.grad_entropy(x)
        L = gas.poisson_matrix(x)
        M = dense_metric(gas, x)
        xi = build_xi_dense(L, grad_s, gas.k1)
        zf = build_zeta_factors(gas.metric_factors(x), grad_e, gas.k0)
        tensor_rhs = xi_contract(xi, grad_s) @ grad_e + zeta_contract(zf, grad_e) @ grad_s
        direct = L @ grad_e + M @ grad_s
        assert np.max(np.abs(tensor_rhs - direct)) <= 1e-11 * (1 + np.max(np.abs(direct)))


def test_reduced_degeneracy_by_symmetry(gas, tiny_gas_training):
    U = tiny_gas_training.basis.truncate(3).U
    x = np.array([0.9, -0.4, 2.4, 2.0])
    xi = reduce_dense(build_xi_dense(gas.poisson_matrix(x), gas.grad_entropy(x), gas.k1), U)
    zf = reduce_dense(
        build_zeta_factors(gas.metric_factors(x), gas.grad_energy(x), gas.k0), U
    )
    rng = np.random.default_rng(47)
    for _ in range(50):
        v = rng.standard_normal(3)
        npt.assert_allclose(xi_contract(xi, v) @ v, 0.0, atol=1e-12 * (1 + v @ v))
        npt.assert_allclose(zeta_contract(zf, v) @ v, 0.0, atol=1e-12 * (1 + v @ v) ** 1.5)


def test_jacobi_constant_bracket_vanishes():
    L = np.array([[0.0, 1.0, 1.0], [-1.0, 0.0, 1.0], [-1.0, -1.0, 0.0]])
    assert jacobi_residual(lambda xh: L, np.zeros(3)) <= 1e-10


def test_jacobi_synthetic_state_dependent_bracket():
    def bracket(xh):
        return np.array([[0.0, xh[1], 0.0], [-xh[1], 0.0, 1.0], [0.0, -1.0, 0.0]])

    value = jacobi_residual(bracket, np.array([0.4, -0.8, 0.1]))
    assert value == pytest.approx(1.0, abs=1e-6)


def test_jacobi_below_three_dims_trivial():
    assert jacobi_residual(lambda xh: np.zeros((2, 2)), np.zeros(2)) == 0.0


def test_jacobi_step_validation():
    with pytest.raises(ValueError):
        jacobi_residual(lambda xh: np.zeros((3, 3)), np.zeros(3), h=-1.0)


def test_zeta_factor_stack_type():
    zf = DenseZetaFactors(np.zeros((2, 4, 4)))
    assert zf.dim == 4
