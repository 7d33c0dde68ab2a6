"""Exception hierarchy shared by every module of the package."""

from __future__ import annotations


class HybridDeltaError(Exception):
    """Base class for all errors raised by this package."""


class DomainError(HybridDeltaError, ValueError):
    """An argument lies outside the domain where the routine is defined."""


class ConvergenceError(HybridDeltaError, ArithmeticError):
    """A numerical procedure failed to meet its tolerance.

    The best available estimate and its error bound are kept so that
    callers can still report something useful.
    """

    def __init__(self, message: str, best: float | None = None,
                 error_bound: float | None = None):
        super().__init__(message)
        self.best = best
        self.error_bound = error_bound


class NoBoundStateError(HybridDeltaError):
    """The secular equation has no root where one was required."""


class IncompleteScanError(HybridDeltaError):
    """A branch was still negative at the largest admissible scan point.

    ``partial`` holds the bound states that were located before giving up.
    """

    def __init__(self, message: str, partial=()):
        super().__init__(message)
        self.partial = list(partial)


class NearResonanceError(HybridDeltaError, ArithmeticError):
    """The principal matrix is numerically singular at a scattering energy."""

    def __init__(self, message: str, condition: float):
        super().__init__(message)
        self.condition = condition


class ConfigError(HybridDeltaError, ValueError):
    """Invalid run configuration. ``line`` is 1-based when known."""

    def __init__(self, message: str, line: int | None = None):
        if line is not None:
            message = f"line {line}: {message}"
        super().__init__(message)
        self.line = line
