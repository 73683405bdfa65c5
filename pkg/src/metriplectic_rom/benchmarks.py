"""The two benchmark systems: heat/volume-exchanging gas containers and a
damped thermoelastic rod.

Both are supplied with exact operator formulas, seeded initial-condition
samplers matching the published training protocol, and (for the rod) the
affine reduced-factor map that makes the online metric cost independent of
the full state dimension.
"""

import warnings
from dataclasses import dataclass

import numpy as np

from .errors import DomainError
from .systems import MetriplecticSystem

GAS_IC_LOW = np.array([0.08, -1.0, 1.0, 1.0])
GAS_IC_HIGH = np.array([1.8, 1.0, 3.0, 3.0])
ROD_PARAM_LOW = np.array([-0.2, -1.0, 1.0])
ROD_PARAM_HIGH = np.array([5.2, 1.0, 3.0])

# Held-out evaluation conditions used by the benchmark pipelines.
GAS_TEST_IC = (0.9, -0.4, 2.4, 2.0)
ROD_TEST_PARAMS = (0.65, -0.1, 1.9)


@dataclass(frozen=True)
class GasParams:
    """Two gas containers exchanging heat and volume through a moving wall.

    The normalization wall-mass = N*k_B = c-hat = 1 is baked in; ``gamma``
    regulates the heat-transfer rate.
    """

    gamma: float = 8.0

    def __post_init__(self):
        if self.gamma <= 0:
            raise ValueError("gamma must be positive")


@dataclass(frozen=True)
class RodParams:
    """Semi-discretized 1-D damped thermoelastic rod.

    ``n_points`` grid points on [0, ell] give state dimension 2*n_points + 1
    (positions, momenta, total entropy).  The potential defaults to
    V(q) = cos(q), V'(q) = -sin(q).
    """

    n_points: int = 250
    gamma: float = 8.0
    ell: float = 1.0
    mass_density: float = 1.0

    def __post_init__(self):
        if self.n_points < 2:
            raise ValueError("n_points must be at least 2")
        if self.gamma <= 0 or self.ell <= 0 or self.mass_density <= 0:
            raise ValueError("gamma, ell and mass_density must be positive")

    @property
    def dim(self) -> int:
        return 2 * self.n_points + 1

    @property
    def s_grid(self) -> np.ndarray:
        return np.linspace(0.0, self.ell, self.n_points)

    @staticmethod
    def potential(q):
        return np.cos(q)

    @staticmethod
    def potential_prime(q):
        return -np.sin(q)


def _gas_container_energies(x):
    """Internal energies (E1, E2) of the containers; q must stay in (0, 2)."""
    q = x[0]
    if not 0.0 < q < 2.0:
        raise DomainError(f"wall position q={q} outside (0, 2)")
    e1 = np.exp(2.0 * x[2] / 3.0) / q ** (2.0 / 3.0)
    e2 = np.exp(2.0 * x[3] / 3.0) / (2.0 - q) ** (2.0 / 3.0)
    return e1, e2


def gas_system(params: GasParams = GasParams()) -> MetriplecticSystem:
    """Four-dimensional gas-container system with state (q, p, S1, S2).

    Constant symplectic L on the (q, p) block, grad S = (0, 0, 1, 1), and a
    single metric factor m = sqrt(gamma) * (0, 0, 1/T1, -1/T2) with
    temperatures T_i = (2/3) E_i.  Distinguished indices k0 = k1 = 2
    (0-based): the S1-components of grad E and grad S.
    """
    gamma = params.gamma
    sqrt_gamma = np.sqrt(gamma)
    L = np.zeros((4, 4))
    L[0, 1] = 1.0
    L[1, 0] = -1.0
    grad_s = np.array([0.0, 0.0, 1.0, 1.0])

    def energy(x):
        e1, e2 = _gas_container_energies(x)
        return 0.5 * x[1] ** 2 + e1 + e2

    def grad_energy(x):
        e1, e2 = _gas_container_energies(x)
        q = x[0]
        return np.array(
            [(2.0 / 3.0) * (e2 / (2.0 - q) - e1 / q), x[1], (2.0 / 3.0) * e1, (2.0 / 3.0) * e2]
        )

    def metric_factors(x):
        e1, e2 = _gas_container_energies(x)
        t1 = (2.0 / 3.0) * e1
        t2 = (2.0 / 3.0) * e2
        return np.array([[0.0], [0.0], [sqrt_gamma / t1], [-sqrt_gamma / t2]])

    def poisson_apply(x, v):
        return np.array([v[1], -v[0], 0.0, 0.0])

    return MetriplecticSystem(
        dim=4,
        energy=energy,
        entropy=lambda x: float(x[2] + x[3]),
        grad_energy=grad_energy,
        grad_entropy=lambda x: grad_s.copy(),
        poisson_matrix=lambda x: L.copy(),
        metric_factors=metric_factors,
        k0=2,
        k1=2,
        name="gas",
        constant_poisson=True,
        constant_grad_entropy=True,
        poisson_apply=poisson_apply,
    )


def gas_sample_ics(seed: int, count: int) -> np.ndarray:
    """Uniform i.i.d. initial states in the training box, seeded."""
    if count < 1:
        raise ValueError("count must be at least 1")
    rng = np.random.default_rng(seed)
    return rng.uniform(GAS_IC_LOW, GAS_IC_HIGH, size=(count, 4))


def rod_system(params: RodParams = RodParams()) -> MetriplecticSystem:
    """(2N+1)-dimensional rod with state (q_1..q_N, p_1..p_N, S).

    Plain (unit-weight) sums discretize the energy, matching the displayed
    discrete gradient (V'(q), p/m, 1); a quadrature-weighted energy would
    rescale the gradients.  The dynamics follow the structure form
    L grad E + M grad S throughout, which yields pdot = -V'(q) - gamma*p/m.
    """
    n = params.n_points
    dim = params.dim
    gamma = params.gamma
    sqrt_gamma = np.sqrt(gamma)
    m = params.mass_density

    def energy(x):
        q, p = x[:n], x[n : 2 * n]
        return float(np.sum(p**2) / (2.0 * m) + np.sum(params.potential(q)) + x[2 * n])

    def grad_energy(x):
        g = np.empty(dim)
        g[:n] = params.potential_prime(x[:n])
        g[n : 2 * n] = x[n : 2 * n] / m
        g[2 * n] = 1.0
        return g

    def grad_entropy(x):
        g = np.zeros(dim)
        g[2 * n] = 1.0
        return g

    def poisson_matrix(x):
        L = np.zeros((dim, dim))
        L[:n, n : 2 * n] = np.eye(n)
        L[n : 2 * n, :n] = -np.eye(n)
        return L

    def poisson_apply(x, v):
        out = np.empty(dim)
        out[:n] = v[n : 2 * n]
        out[n : 2 * n] = -v[:n]
        out[2 * n] = 0.0
        return out

    def metric_factors(x):
        C = np.zeros((dim, n))
        C[n : 2 * n] = sqrt_gamma * np.eye(n)
        C[2 * n] = -sqrt_gamma * x[n : 2 * n] / m
        return C

    def metric_apply(x, v):
        p = x[n : 2 * n]
        t = gamma * (v[n : 2 * n] - p * (v[2 * n] / m))
        out = np.zeros(dim)
        out[n : 2 * n] = t
        out[2 * n] = -(p @ t) / m
        return out

    return MetriplecticSystem(
        dim=dim,
        energy=energy,
        entropy=lambda x: float(x[2 * n]),
        grad_energy=grad_energy,
        grad_entropy=grad_entropy,
        poisson_matrix=poisson_matrix,
        metric_factors=metric_factors,
        k0=2 * n,
        k1=2 * n,
        name="rod",
        constant_poisson=True,
        constant_grad_entropy=True,
        poisson_apply=poisson_apply,
        metric_apply=metric_apply,
    )


def rod_initial_condition(mu1: float, mu2: float, s0: float,
                          params: RodParams = RodParams()) -> np.ndarray:
    """Initial state from the profile family q0 = exp(mu1*s),
    p0 = 1/(1 + mu2*s^2), with total entropy s0.

    Parameters outside the published ranges trigger a warning; a momentum
    denominator within 1e-8 of zero is a genuine singularity and raises.
    """
    point = np.array([mu1, mu2, s0])
    if np.any(point < ROD_PARAM_LOW) or np.any(point > ROD_PARAM_HIGH):
        warnings.warn(
            f"rod initial-condition parameters {tuple(point)} outside the "
            "stated sampling box",
            stacklevel=2,
        )
    s = params.s_grid
    denom = 1.0 + mu2 * s**2
    if np.min(np.abs(denom)) < 1e-8:
        raise ValueError("momentum profile denominator 1 + mu2*s^2 vanishes on the grid")
    return np.concatenate([np.exp(mu1 * s), 1.0 / denom, [s0]])


def rod_sample_params(seed: int, count: int) -> np.ndarray:
    """Uniform i.i.d. (mu1, mu2, S0) triplets in the training box, seeded."""
    if count < 1:
        raise ValueError("count must be at least 1")
    rng = np.random.default_rng(seed)
    return rng.uniform(ROD_PARAM_LOW, ROD_PARAM_HIGH, size=(count, 3))


def rod_reduced_factor_map(U: np.ndarray, x0: np.ndarray, params: RodParams):
    """Affine map xhat -> U^T C(x_tilde) for the rod, shape (n, n_points).

    The factor matrix is affine in the momenta, so the reduced factors split
    into a precomputed base at x0 plus a rank-one online update; cost per
    call is O(n * n_points) with no lift to full dimension.
    """
    n_pts = params.n_points
    sqrt_gamma = np.sqrt(params.gamma)
    m = params.mass_density
    U_p = U[n_pts : 2 * n_pts, :]
    u_last = U[2 * n_pts, :]
    base = sqrt_gamma * (U_p.T - np.outer(u_last, x0[n_pts : 2 * n_pts]) / m)

    def reduced_factors(xhat, x_tilde=None):
        return base - (sqrt_gamma / m) * np.outer(u_last, U_p @ xhat)

    return reduced_factors


def rod_reduced_factors(model, xhat: np.ndarray) -> np.ndarray:
    """Evaluate a rod model's registered reduced-factor map at ``xhat``."""
    if model.reduced_factors is None:
        raise ValueError("model carries no reduced-factor map")
    return model.reduced_factors(np.asarray(xhat, dtype=float), None)
