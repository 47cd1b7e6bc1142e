"""Exception hierarchy shared across the package.

The CLI maps these onto exit codes: UsageError -> 2, DataError -> 3,
NumericalError -> 4.
"""


class CoxmaintError(Exception):
    """Base class for all package errors."""


class UsageError(CoxmaintError):
    """Invalid arguments, configuration, or preconditions."""


class DataError(CoxmaintError):
    """Malformed or structurally inconsistent input data."""


class ParseError(DataError):
    """A line of an input file could not be parsed."""

    def __init__(self, message: str, line_number: int | None = None):
        if line_number is not None:
            message = f"line {line_number}: {message}"
        super().__init__(message)
        self.line_number = line_number


class StructureError(DataError):
    """Parsed rows violate the expected per-unit structure."""


class NumericalError(CoxmaintError):
    """A numerical procedure failed."""


class ConvergenceError(NumericalError):
    """Optimizer did not converge; carries the last iterate."""

    def __init__(self, message: str, beta=None, diagnostics=None):
        super().__init__(message)
        self.beta = beta
        self.diagnostics = diagnostics


class SeparationError(NumericalError):
    """Monotone likelihood: a coefficient diverges without bound."""
