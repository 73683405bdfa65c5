"""Structure-preserving reduced-order models for metriplectic systems.

The package implements the full-order metriplectic abstraction (energy
conserved, entropy produced), POD training with gradient-augmented
snapshots, three reduced models over the shared basis (Galerkin,
projected-operator, structure-preserving) and a benchmark harness with
invariant verification.
"""

from .benchmarks import (
    GasParams,
    RodParams,
    gas_sample_ics,
    gas_system,
    rod_initial_condition,
    rod_reduced_factor_map,
    rod_reduced_factors,
    rod_sample_params,
    rod_system,
)
from .config import ExperimentConfig, default_config, load_config
from .errors import (
    CompatibilityError,
    DegenerateIndexError,
    DimensionMismatchError,
    DomainError,
    GridMismatchError,
    MetriplecticError,
    SolverFailure,
)
from .integrate import Trajectory, integrate, sample_grid
from .metrics import energy_drift, energy_samples, entropy_samples, error_metrics
from .oracle import (
    DenseXi,
    DenseZetaFactors,
    build_xi_dense,
    build_zeta_factors,
    dense_metric,
    jacobi_residual,
    reduce_dense,
    xi_contract,
    zeta_contract,
)
from .pod import (
    PodBasis,
    SnapshotMatrix,
    assemble_snapshots,
    compute_basis,
    projection_residual,
)
from .report import ReportRow, emit_report, parse_report
from .rom import (
    RomModel,
    build_ehrom,
    build_grom,
    build_sprom,
    lift,
    lift_trajectory,
    load_model,
    reduced_poisson_matrix,
    reduced_rates,
    save_model,
    sprom_rhs,
)
from .systems import (
    DegeneracyReport,
    MetriplecticSystem,
    check_degeneracy,
    fom_rhs,
    thermo_rates,
    validate_state,
)

__version__ = "0.1.0"
