"""Shared exception types.

Everything raised on purpose by this package derives from FansqError, so
callers (and the CLI) can distinguish "you asked for something invalid"
(DomainError) from "the computation could not be completed" (the rest).
"""


class FansqError(Exception):
    """Base class for all package-specific failures."""


class DomainError(FansqError, ValueError):
    """Arguments outside the defined domain of an operation."""


class SingularNonlinearity(FansqError, ArithmeticError):
    """The nonlinearity hit a zero of the denominator Laguerre polynomial.

    The state itself is ill-defined at such points, so evaluation aborts
    with the offending Fock index instead of skipping terms.
    """

    def __init__(self, message: str, index: int | None = None):
        super().__init__(message)
        self.index = index


class SeriesNotConverged(FansqError, ArithmeticError):
    """A series hit its term cap before meeting the tail criterion."""


class TruncationTooSmall(FansqError, ValueError):
    """A truncated Fock vector is too short for the requested operation."""


class EmptyBoundary(FansqError):
    """No sign change found, so there is no boundary/curve to trace."""
