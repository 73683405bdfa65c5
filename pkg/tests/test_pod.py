import numpy as np
import numpy.testing as npt
import pytest

from metriplectic_rom import (
    SnapshotMatrix,
    Trajectory,
    assemble_snapshots,
    compute_basis,
    projection_residual,
)
from metriplectic_rom.pod import ENERGY_GRADIENT, ENTROPY_GRADIENT, STATE_SHIFT
from metriplectic_rom.systems import MetriplecticSystem


def synthetic_system(dim=3, constant_grad_entropy=True):
    """Minimal evaluator bundle for snapshot assembly tests."""
    return MetriplecticSystem(
        dim=dim,
        energy=lambda x: float(x @ x),
        entropy=lambda x: float(np.sum(x)),
        grad_energy=lambda x: 2.0 * x,
        grad_entropy=(lambda x: np.ones(dim)) if constant_grad_entropy else (lambda x: x**2),
        poisson_matrix=lambda x: np.zeros((dim, dim)),
        metric_factors=lambda x: np.zeros((dim, 1)),
        k0=0,
        k1=0,
        constant_grad_entropy=constant_grad_entropy,
    )


def make_trajectory(states):
    states = np.asarray(states, dtype=float)
    return Trajectory(np.arange(states.shape[0], dtype=float), states)


def test_column_count_with_dedupe():
    system = synthetic_system()
    traj = make_trajectory(np.random.default_rng(0).standard_normal((3, 3)))
    Y = assemble_snapshots([traj], system)
    assert Y.n_columns == 3 + 3 + 1
    assert list(Y.provenance) == [STATE_SHIFT] * 3 + [ENERGY_GRADIENT] * 3 + [ENTROPY_GRADIENT]


def test_column_count_without_dedupe_state_dependent_grad():
    system = synthetic_system(constant_grad_entropy=False)
    rng = np.random.default_rng(1)
    trajs = [make_trajectory(rng.standard_normal((4, 3))),
             make_trajectory(rng.standard_normal((2, 3)))]
    Y = assemble_snapshots(trajs, system, dedupe_constant_grad_entropy=False)
    assert Y.n_columns == 3 * 4 + 3 * 2
    # per-trajectory interleaved blocks: w, grad-E, grad-S
    expected = ([STATE_SHIFT] * 4 + [ENERGY_GRADIENT] * 4 + [ENTROPY_GRADIENT] * 4
                + [STATE_SHIFT] * 2 + [ENERGY_GRADIENT] * 2 + [ENTROPY_GRADIENT] * 2)
    assert list(Y.provenance) == expected


def test_dedupe_flag_ignored_for_state_dependent_grad():
    system = synthetic_system(constant_grad_entropy=False)
    traj = make_trajectory(np.random.default_rng(2).standard_normal((3, 3)))
    Y = assemble_snapshots([traj], system, dedupe_constant_grad_entropy=True)
    assert Y.n_columns == 9  # no single-column shortcut without constancy


def test_shift_uses_each_trajectorys_own_x0():
    system = synthetic_system()
    rng = np.random.default_rng(3)
    states_a = rng.standard_normal((3, 3)) + 5.0
    states_b = rng.standard_normal((2, 3)) - 7.0
    Y = assemble_snapshots([make_trajectory(states_a), make_trajectory(states_b)], system)
    # layout: [w_a(3) | gradE_a(3) | w_b(2) | gradE_b(2) | gradS(1)]
    npt.assert_allclose(Y.columns[:, 0], 0.0)  # first w column of each block is zero
    npt.assert_allclose(Y.columns[:, 6], 0.0)
    npt.assert_allclose(Y.columns[:, 1], states_a[1] - states_a[0])
    npt.assert_allclose(Y.columns[:, 7], states_b[1] - states_b[0])


def test_gradient_columns_are_scaled():
    system = synthetic_system()
    states = np.random.default_rng(4).standard_normal((2, 3))
    Y = assemble_snapshots([make_trajectory(states)], system, mu=0.5, nu=2.0)
    npt.assert_allclose(Y.columns[:, 2], 0.5 * 2.0 * states[0])
    npt.assert_allclose(Y.columns[:, -1], 2.0 * np.ones(3))


def test_rank_one_closed_form():
    Y = SnapshotMatrix(np.outer([3.0, 4.0, 0.0], [1.0, 1.0]))
    basis = compute_basis(Y, 1)
    assert basis.singular_values[0] == pytest.approx(5.0 * np.sqrt(2.0), rel=1e-14)
    npt.assert_allclose(basis.U[:, 0], [0.6, 0.8, 0.0], atol=1e-15)
    res = projection_residual(basis, Y)
    assert res.residual_sq <= 1e-20 * np.sum(Y.columns**2)
    assert res.tail_sq == 0.0


def test_orthonormal_columns_example():
    Y = SnapshotMatrix(np.array([[1.0, 0.0], [0.0, 1.0], [0.0, 0.0]]))
    basis = compute_basis(Y, 2)
    npt.assert_allclose(basis.singular_values, [1.0, 1.0])
    projector = basis.U @ basis.U.T
    npt.assert_allclose(projector, np.diag([1.0, 1.0, 0.0]), atol=1e-14)


def test_random_matrix_identity_and_residual():
    rng = np.random.default_rng(5)
    Y = SnapshotMatrix(rng.standard_normal((10, 50)))
    basis = compute_basis(Y, 4)
    npt.assert_allclose(basis.U.T @ basis.U, np.eye(4), atol=1e-12)
    res = projection_residual(basis, Y)
    assert res.rel_gap <= 1e-8


def test_column_permutation_invariance():
    rng = np.random.default_rng(6)
    Y = rng.standard_normal((8, 30))
    perm = rng.permutation(30)
    a = compute_basis(SnapshotMatrix(Y), 3)
    b = compute_basis(SnapshotMatrix(Y[:, perm]), 3)
    npt.assert_allclose(a.singular_values, b.singular_values, rtol=1e-12)
    # subspaces agree: projector distance equals sin of largest principal angle
    npt.assert_allclose(a.U @ a.U.T, b.U @ b.U.T, atol=1e-10)


def test_monotone_tail():
    rng = np.random.default_rng(7)
    Y = SnapshotMatrix(rng.standard_normal((10, 40)))
    basis = compute_basis(Y, 10)
    tails = [basis.tail_energy(n) for n in range(11)]
    assert all(a >= b - 1e-15 for a, b in zip(tails, tails[1:]))


def test_rank_error():
    Y = SnapshotMatrix(np.outer([1.0, 2.0, 0.0], [1.0, 1.0, 2.0]))  # rank 1
    with pytest.raises(ValueError, match="rank"):
        compute_basis(Y, 2)
    with pytest.raises(ValueError):
        compute_basis(Y, 0)


def test_truncate_matches_direct_computation():
    rng = np.random.default_rng(8)
    Y = SnapshotMatrix(rng.standard_normal((12, 60)))
    full = compute_basis(Y, 6)
    direct = compute_basis(Y, 3)
    truncated = full.truncate(3)
    npt.assert_array_equal(truncated.U, direct.U)
    npt.assert_array_equal(truncated.singular_values, direct.singular_values)
    with pytest.raises(ValueError):
        full.truncate(7)


def test_sign_convention_is_deterministic():
    rng = np.random.default_rng(9)
    Y = SnapshotMatrix(rng.standard_normal((6, 20)))
    a = compute_basis(Y, 4)
    b = compute_basis(Y, 4)
    assert np.array_equal(a.U, b.U)
    idx = np.argmax(np.abs(a.U), axis=0)
    assert np.all(a.U[idx, np.arange(4)] >= 0.0)


def test_pod_identity_on_tiny_gas_protocol(tiny_gas_training):
    snapshots = tiny_gas_training.snapshots
    assert snapshots.n_columns == 5 * 101 * 2 + 1
    for n in (1, 2, 3, 4):
        basis = tiny_gas_training.basis.truncate(n) if n <= tiny_gas_training.basis.n \
            else compute_basis(snapshots, n)
        res = projection_residual(basis, snapshots)
        assert res.rel_gap <= 1e-8, (n, res)


def test_provenance_length_mismatch():
    with pytest.raises(Exception):
        SnapshotMatrix(np.zeros((3, 2)), provenance=np.array(["state-shift"]))
