"""Exception types shared across the workbench."""


class WorkbenchError(Exception):
    """Base class for all domain errors raised by this package."""


class ValidationError(WorkbenchError, ValueError):
    """An input violates a type invariant (range, sign, shape)."""


class OutOfRangeError(WorkbenchError, ValueError):
    """A query falls outside the data it would be answered from (no extrapolation)."""


class FamilyNotFoundError(WorkbenchError, LookupError):
    """No dataset rows exist for the requested wing."""


class NoEquilibriumError(WorkbenchError, ArithmeticError):
    """The moment residual has no sign change in the search interval."""


class InsufficientDataError(WorkbenchError, ValueError):
    """A recording is too short for the requested analysis."""


class MixedWingError(WorkbenchError, ValueError):
    """Recordings from different wings were combined into one sweep."""


class IntegrationDivergedError(WorkbenchError, ArithmeticError):
    """The simulation state became non-finite or left its valid domain."""

    def __init__(self, message: str, t_s: float | None = None):
        super().__init__(message)
        self.t_s = t_s
