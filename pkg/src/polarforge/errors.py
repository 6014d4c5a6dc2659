"""Exception hierarchy. The CLI maps each family to a stable exit code."""


class PolarforgeError(Exception):
    """Base class for all package errors."""

    exit_code = 1


class ValidationError(PolarforgeError, ValueError):
    """Malformed input: bad index text, out-of-range parameters, etc."""

    exit_code = 2


class DomainError(ValidationError):
    """Argument outside the mathematical domain of a special function."""


class UnsupportedSpecError(ValidationError):
    """Operation is not defined for the given channel kind."""


class GeometryError(PolarforgeError, ArithmeticError):
    """The update-rule geometry does not hold; signals a broken phi."""

    exit_code = 3


class ConsistencyError(PolarforgeError, ArithmeticError):
    """A universal classification disagrees with computed reliabilities."""

    exit_code = 3

    def __init__(self, message, violations=()):
        super().__init__(message)
        self.violations = list(violations)
