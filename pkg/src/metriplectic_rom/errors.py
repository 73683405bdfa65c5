"""Exception types shared across the package."""


class MetriplecticError(Exception):
    """Base class for all library-specific failures."""


class DimensionMismatchError(MetriplecticError, ValueError):
    """Array shapes are inconsistent with the system or basis dimensions."""


class DegenerateIndexError(MetriplecticError):
    """A distinguished gradient component fell below the configured floor."""


class CompatibilityError(MetriplecticError):
    """The degeneracy conditions L*grad(S) = 0 or m.grad(E) = 0 are violated
    beyond tolerance, so the tensor factorizations are not applicable."""


class DomainError(MetriplecticError):
    """State left the domain where the system's functions are defined."""


class GridMismatchError(MetriplecticError, ValueError):
    """Two trajectories do not share the same output time grid."""


class SolverFailure(MetriplecticError):
    """Adaptive integration could not be continued.

    Carries the last successfully reached time and state so sweeps can record
    partial results instead of aborting.
    """

    def __init__(self, reason, last_time, last_state):
        super().__init__(f"{reason} (last good time t={last_time:.6g})")
        self.reason = reason
        self.last_time = last_time
        self.last_state = last_state
