from typing import Any


class FrozenERError(Exception):
    """Base class for every error raised by the toolkit."""


class ConfigurationError(FrozenERError, ValueError):
    """Invalid parameters, unknown experiment names, schema violations."""


class DomainError(FrozenERError, ValueError):
    """Argument outside the mathematical domain of an operation."""


class OrderingError(FrozenERError, ValueError):
    """Request that would rewind a simulation."""


class StatisticsError(FrozenERError, ValueError):
    """Not enough usable data for a statistic."""


class NumericError(FrozenERError, ArithmeticError):
    """Quadrature, root finding or sampling failed to meet its tolerance.

    `context` carries whatever state helps diagnose the failure (bracket,
    worst subinterval, window bounds).
    """

    def __init__(self, message: str, context: dict[str, Any] | None = None):
        super().__init__(message)
        self.context = context or {}

    def __str__(self) -> str:
        base = super().__str__()
        if not self.context:
            return base
        details = ", ".join(f"{key}={value!r}" for key, value in self.context.items())
        return f"{base} ({details})"


class ResultsIOError(FrozenERError, OSError):
    """Reading or writing a results file failed."""

    def __init__(self, message: str, path: str):
        super().__init__(f"{message}: {path}")
        self.path = path
