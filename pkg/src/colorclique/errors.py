"""Exception types shared across the package."""


class StructuralError(ValueError):
    """Objects from incompatible structures were combined (e.g. mixed groups)."""


class DomainError(ValueError):
    """An argument violates a documented precondition."""


class StatisticalFailure(RuntimeError):
    """A randomized procedure exhausted its retry budget.

    The last attempt's result object is attached as ``trace`` so callers can
    inspect or continue best-effort.
    """

    def __init__(self, message, trace=None):
        super().__init__(message)
        self.trace = trace


class BudgetExceeded(RuntimeError):
    """An exhaustive enumeration was refused; the message names the bound."""
