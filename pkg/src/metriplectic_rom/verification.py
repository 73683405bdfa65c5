"""Invariant verification suite wrapping the structural checks of every
module: degeneracy conditions, oracle equivalence, the POD tail identity,
reduced conservation/production and the Jacobi diagnostic."""

from dataclasses import dataclass
from typing import List, Optional

import numpy as np

from .benchmarks import RodParams, gas_sample_ics, rod_initial_condition, rod_sample_params, rod_system
from .config import ExperimentConfig
from .errors import DomainError
from .oracle import (
    build_xi_dense,
    build_zeta_factors,
    dense_metric,
    jacobi_residual,
    reduce_dense,
    xi_contract,
    zeta_contract,
)
from .pipelines import build_model, evaluation_initial_state, make_system, run_training
from .pod import PodBasis
from .rom import build_sprom, reduced_poisson_matrix, reduced_rates, sprom_rhs
from .systems import MetriplecticSystem, check_degeneracy


@dataclass(frozen=True)
class CheckResult:
    name: str
    passed: bool
    value: float
    detail: str = ""

    def line(self) -> str:
        status = "PASS" if self.passed else "FAIL"
        extra = f" ({self.detail})" if self.detail else ""
        return f"{status}  {self.name}: {self.value:.3e}{extra}"


def sample_benchmark_states(config: ExperimentConfig, count: int,
                            seed_offset: int = 1) -> np.ndarray:
    """Random full states inside the benchmark's initial-condition box."""
    if config.benchmark == "gas":
        return gas_sample_ics(config.seed + seed_offset, count)
    params = rod_sample_params(config.seed + seed_offset, count)
    return np.array([rod_initial_condition(*row, params=config.rod) for row in params])


def sample_reduced_states(config: ExperimentConfig, model, count: int,
                          seed_offset: int = 2) -> np.ndarray:
    """Random reduced states whose lifts stay inside the system domain."""
    rng = np.random.default_rng(config.seed + seed_offset)
    scale = 0.3 if config.benchmark == "gas" else 1.0
    system = model.system
    samples = []
    while len(samples) < count:
        xhat = scale * rng.standard_normal(model.n)
        try:
            system.grad_energy(model.x0 + model.basis.U @ xhat)
        except DomainError:
            continue
        samples.append(xhat)
    return np.array(samples)


def check_degeneracy_suite(config: ExperimentConfig, system: MetriplecticSystem,
                           count: int = 1000, tol: float = 1e-12) -> CheckResult:
    worst = 0.0
    for x in sample_benchmark_states(config, count):
        report = check_degeneracy(system, x, tol)
        worst = max(worst, report.lnorm, report.mnorm, report.skew_defect)
    return CheckResult(f"degeneracy suite ({count} states, tol {tol:g})",
                       worst <= tol, worst, "max of |L gS|, |M gE|, |L+L^T|")


def check_basis_orthonormality(basis: PodBasis, tol: float = 1e-10) -> CheckResult:
    defect = float(np.max(np.abs(basis.U.T @ basis.U - np.eye(basis.n))))
    return CheckResult("basis orthonormality", defect <= tol, defect, "|U^T U - I|_inf")


def check_pod_identity(rel_gaps: dict, tol: float = 1e-8) -> CheckResult:
    worst = max(rel_gaps.values())
    detail = ", ".join(f"n={n}: {g:.1e}" for n, g in sorted(rel_gaps.items()))
    return CheckResult("POD tail identity", worst <= tol, worst, detail)


def check_oracle_equivalence(config: ExperimentConfig, basis: PodBasis,
                             n_values=(2, 3), count: int = 100,
                             rhs_tol: float = 1e-12, tensor_tol: float = 1e-11) -> List[CheckResult]:
    """Dense Proposition-construction vs the wedge-form model.

    Runs on the gas system directly; for the rod config a small-dimension rod
    stands in, since dense tensors are gated to small N (the check is
    structural, not size-dependent).
    """
    if config.benchmark == "gas":
        system = make_system(config)
        x0 = evaluation_initial_state(config)
        basis_small = basis
    else:
        small = RodParams(n_points=6, gamma=config.rod.gamma)
        system = rod_system(small)
        x0 = rod_initial_condition(*config.evaluation.test_params, params=small)
        rng = np.random.default_rng(config.seed + 3)
        Q, _ = np.linalg.qr(rng.standard_normal((system.dim, max(n_values))))
        basis_small = PodBasis(Q, np.ones(max(n_values)), max(n_values))
    results = []
    worst_rhs = 0.0
    worst_tensor = 0.0
    for n in n_values:
        model = build_sprom(system, basis_small.truncate(n), x0)
        for xhat in sample_reduced_states(config, model, count, seed_offset=4 + n):
            x_tilde = model.x0 + model.basis.U @ xhat
            grad_e = system.grad_energy(x_tilde)
            grad_s = system.grad_entropy(x_tilde)
            L = system.poisson_matrix(x_tilde)
            xi = build_xi_dense(L, grad_s, system.k1)
            zf = build_zeta_factors(system.metric_factors(x_tilde), grad_e, system.k0)
            worst_tensor = max(
                worst_tensor,
                float(np.max(np.abs(xi_contract(xi, grad_s) - L)))
                / (1.0 + float(np.max(np.abs(L)))),
                float(np.max(np.abs(zeta_contract(zf, grad_e) - dense_metric(system, x_tilde))))
                / (1.0 + float(np.max(np.abs(dense_metric(system, x_tilde))))),
            )
            xi_hat = reduce_dense(xi, model.basis.U)
            zf_hat = reduce_dense(zf, model.basis.U)
            ge_hat = model.basis.U.T @ grad_e
            gs_hat = model.basis.U.T @ grad_s
            dense_rhs = xi_contract(xi_hat, gs_hat) @ ge_hat + zeta_contract(zf_hat, ge_hat) @ gs_hat
            wedge = sprom_rhs(model, xhat)
            worst_rhs = max(
                worst_rhs,
                float(np.max(np.abs(dense_rhs - wedge))) / (1.0 + float(np.max(np.abs(dense_rhs)))),
            )
    results.append(CheckResult("oracle equivalence: dense vs wedge RHS",
                               worst_rhs <= rhs_tol, worst_rhs,
                               f"n in {tuple(n_values)}, {count} states each"))
    results.append(CheckResult("oracle contraction: xi(gS)=L, zeta(gE,gE)=M",
                               worst_tensor <= tensor_tol, worst_tensor))
    return results


def check_reduced_structure(config: ExperimentConfig, system: MetriplecticSystem,
                            basis: PodBasis, count: int = 1000,
                            energy_tol: float = 1e-11,
                            entropy_tol: float = -1e-12) -> CheckResult:
    x0 = evaluation_initial_state(config)
    worst_energy = 0.0
    worst_entropy = 0.0
    for n in config.evaluation.n_values:
        model = build_model(config, system, basis, x0, "SP", n)
        for xhat in sample_reduced_states(config, model, count, seed_offset=7 + n):
            de, ds = reduced_rates(model, xhat)
            ge_hat = model.basis.U.T @ system.grad_energy(model.x0 + model.basis.U @ xhat)
            worst_energy = max(worst_energy, abs(de) / (1.0 + float(ge_hat @ ge_hat)))
            worst_entropy = min(worst_entropy, ds)
    passed = worst_energy <= energy_tol and worst_entropy >= entropy_tol
    return CheckResult(
        f"reduced conservation/production ({count} states per n)", passed, worst_energy,
        f"scaled |dE| max {worst_energy:.1e}, min dS {worst_entropy:.1e}")


def check_jacobi(config: ExperimentConfig, system: MetriplecticSystem,
                 basis: PodBasis, tol: float = 1e-8) -> List[CheckResult]:
    x0 = evaluation_initial_state(config)
    n_jac = min(3, max(config.evaluation.n_values))  # triples need n >= 3
    model = build_model(config, system, basis, x0, "SP", n_jac)
    residual = jacobi_residual(lambda xh: reduced_poisson_matrix(model, xh),
                               model.initial_reduced_state())
    results = [CheckResult("Jacobi residual of the reduced bracket",
                           residual <= tol, residual, "constant L case")]

    def synthetic(xh):
        return np.array([[0.0, xh[1], 0.0], [-xh[1], 0.0, 1.0], [0.0, -1.0, 0.0]])

    value = jacobi_residual(synthetic, np.array([0.3, -0.2, 0.5]))
    results.append(CheckResult("Jacobi residual of the synthetic state-dependent bracket",
                               abs(value - 1.0) <= 1e-5, value, "expected 1"))
    return results


def check_rod_factor_map(config: ExperimentConfig, system: MetriplecticSystem,
                         basis: PodBasis, count: int = 20,
                         tol: float = 1e-12) -> Optional[CheckResult]:
    if config.benchmark != "rod":
        return None
    x0 = evaluation_initial_state(config)
    model = build_model(config, system, basis, x0, "SP", max(config.evaluation.n_values))
    worst = 0.0
    scale = 0.0
    for xhat in sample_reduced_states(config, model, count, seed_offset=11):
        x_tilde = model.x0 + model.basis.U @ xhat
        fast = model.reduced_factors(xhat, x_tilde)
        naive = model.basis.U.T @ system.metric_factors(x_tilde)
        worst = max(worst, float(np.max(np.abs(fast - naive))))
        scale = max(scale, float(np.max(np.abs(naive))))
    return CheckResult("rod reduced-factor map vs naive projection",
                       worst <= tol * (1.0 + scale), worst, "max entrywise deviation")


def run_verification(config: ExperimentConfig,
                     basis: Optional[PodBasis] = None) -> List[CheckResult]:
    """Run the full invariant suite; a pre-loaded basis (possibly corrupted)
    can be injected, otherwise training runs in-memory."""
    system = make_system(config)
    results = [check_degeneracy_suite(config, system)]
    if basis is None:
        training = run_training(config, persist=False)
        basis = training.basis
        rel_gaps = training.rel_gaps
        results.append(check_basis_orthonormality(basis))
        results.append(check_pod_identity(rel_gaps))
    else:
        ortho = check_basis_orthonormality(basis)
        results.append(ortho)
        if not ortho.passed:
            return results  # downstream checks are meaningless on a bad basis
    results.extend(check_oracle_equivalence(config, basis))
    results.append(check_reduced_structure(config, system, basis))
    results.extend(check_jacobi(config, system, basis))
    rod_check = check_rod_factor_map(config, system, basis)
    if rod_check is not None:
        results.append(rod_check)
    return results
