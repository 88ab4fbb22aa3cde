"""Exception hierarchy shared by the solver modules."""

from __future__ import annotations

from typing import Any


class LagfluxError(Exception):
    """Base class for every error raised by this package."""


class ConfigError(LagfluxError, ValueError):
    """Invalid case configuration or mesh description."""

    def __init__(self, message: str, line: int | None = None, source: str | None = None):
        self.line = line
        self.source = source
        where = ""
        if source is not None:
            where = f"{source}:"
        if line is not None:
            where = f"{where}{line}:"
        super().__init__(f"{where} {message}".strip() if where else message)


class InvalidStateError(LagfluxError, ValueError):
    """A state with non-positive density or pressure was encountered.

    ``context`` carries whatever locates the offending value (cell index,
    trace side, step number, ...).
    """

    def __init__(self, message: str, **context: Any):
        self.context = context
        if context:
            detail = ", ".join(f"{k}={v}" for k, v in context.items())
            message = f"{message} ({detail})"
        super().__init__(message)


class PositivityError(InvalidStateError):
    """A time stage produced a non-physical cell."""


class StepTooLargeError(LagfluxError, ValueError):
    """The requested time step violates a stability or geometric bound."""


class VacuumError(LagfluxError, ValueError):
    """Riemann data generates vacuum; the exact solver does not handle it."""


class ConvergenceError(LagfluxError, RuntimeError):
    """An iterative solve failed to converge."""


class DeterminismError(LagfluxError, RuntimeError):
    """Runs that must be bit-identical produced different results."""
