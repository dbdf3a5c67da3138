"""Shared exception types."""


class TubeMCError(Exception):
    """Base class for all errors raised by this package."""


class DomainError(TubeMCError, ValueError):
    """An argument lies outside the mathematical domain of an operation."""


class ValidationError(TubeMCError, ValueError):
    """A configuration or scenario violates its invariants.

    `violations` lists every violated invariant, not just the first one.
    """

    def __init__(self, violations):
        if isinstance(violations, str):
            violations = [violations]
        self.violations = list(violations)
        super().__init__("; ".join(self.violations))


class NumericalError(TubeMCError, ArithmeticError):
    """A numerical routine failed to reach its accuracy target.

    Carries diagnostics so callers can report what was achieved.
    """

    def __init__(self, message, **diagnostics):
        super().__init__(message)
        self.diagnostics = dict(diagnostics)


class UndefinedMetricError(TubeMCError, ValueError):
    """A metric is undefined for the given input (e.g. constant reference)."""
