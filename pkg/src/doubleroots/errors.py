"""Exception types shared across the package."""


class DoubleRootsError(Exception):
    """Base class for all package-specific errors."""


class MaxAtomTooLarge(DoubleRootsError):
    """A coefficient law puts more than half its mass on a single integer.

    No decomposition into fair two-point laws exists in that case.
    """


class BudgetExceeded(DoubleRootsError):
    """An exact computation would exceed the configured size budget."""

    def __init__(self, message: str, estimated: int, budget: int):
        super().__init__(message)
        self.estimated = estimated
        self.budget = budget


class NonConverged(DoubleRootsError):
    """The iterative root finder did not reach the residual tolerance."""

    def __init__(self, message: str, residual: float):
        super().__init__(message)
        self.residual = residual


class ZeroInput(ValueError, DoubleRootsError):
    """An argument that must be nonzero was zero."""


class DomainError(ValueError, DoubleRootsError):
    """An argument lies outside the mathematical domain of the operation."""
