"""Exception hierarchy shared across the package."""


class AdditiveTailsError(Exception):
    """Base class for all errors raised by this package."""


class EmptyTableError(AdditiveTailsError):
    """Sieve limit below 2: no table can be built."""


class CapacityError(AdditiveTailsError):
    """Requested limit exceeds the configured memory bound."""


class DegenerateError(AdditiveTailsError):
    """The additive function vanishes on every prime in range (B^2 = 0)."""


class DomainError(AdditiveTailsError):
    """Argument outside the mathematical domain of the operation."""


class NonInvertibleError(AdditiveTailsError):
    """Series has zero linear coefficient; no compositional inverse."""


class ShiftedSeriesError(AdditiveTailsError):
    """Series has a nonzero constant term; invert after shifting."""


class RangeGuardError(AdditiveTailsError):
    """Input violates a documented numeric range guard (delta cutoff,
    series radius, exponent overflow)."""


class SolverError(AdditiveTailsError):
    """Root finder failed to converge within its iteration cap."""


class ReconstructionError(AdditiveTailsError):
    """Moment fit infeasible; carries the least-squares residual."""

    def __init__(self, message: str, residual: float | None = None):
        super().__init__(message)
        self.residual = residual


class ContractError(AdditiveTailsError):
    """Input violates a structural precondition (e.g. coefficient
    normalization) rather than a numeric guard."""
