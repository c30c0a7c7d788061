"""Exception hierarchy shared by all modules."""

from __future__ import annotations


class BreakawayError(Exception):
    """Base class for every error raised by this package."""


class DomainError(BreakawayError, ValueError):
    """An argument lies outside the domain of the operation."""


class ConvergenceError(BreakawayError, ArithmeticError):
    """An iterative solve ran out of budget.

    Carries the last iterate and its residual so callers can inspect how
    far off the solve ended.
    """

    def __init__(self, message: str, last_iterate=None, residual: float | None = None):
        super().__init__(message)
        self.last_iterate = last_iterate
        self.residual = residual


class StepRejected(BreakawayError):
    """The presliding resolution guard tripped; the caller must reduce dt."""


class SimulationBlowUp(BreakawayError, ArithmeticError):
    """The integrated state became non-finite."""

    def __init__(self, message: str, last_sample=None):
        super().__init__(message)
        self.last_sample = last_sample


class IdentifiabilityError(BreakawayError, ValueError):
    """The data cannot determine the requested parameters."""


class NonClosedLoop(BreakawayError, ArithmeticError):
    """A hysteresis cycle failed to close within tolerance."""


class InputError(BreakawayError, ValueError):
    """Malformed user input (file contents or command-line values)."""

    def __init__(self, message: str, path=None, line: int | None = None):
        where = ""
        if path is not None:
            where = f"{path}"
            if line is not None:
                where += f":{line}"
            where += ": "
        super().__init__(where + message)
        self.path = path
        self.line = line
