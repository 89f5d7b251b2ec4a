"""Typed errors raised by every module.

All validation failures raise one of these; nothing is silently coerced.
"""


class InfometerError(Exception):
    """Base class for all toolkit errors."""


class InvalidConfig(InfometerError, ValueError):
    """A parameter is out of its allowed range (bad k, B, S, alpha, ...)."""


class DegenerateInput(InfometerError, ValueError):
    """Data carries no usable variation (constant column, all-tied sample)."""


class InsufficientData(InfometerError, ValueError):
    """Too few observations for the requested operation."""


class DisjointSupport(InfometerError, ValueError):
    """p puts mass where q has none and no smoothing was requested."""


class SystemTooLarge(InfometerError, ValueError):
    """Binary-network operation above the hard node cap."""


class MissingField(InfometerError, ValueError):
    """A reporting manifest is incomplete; carries the missing field name."""

    def __init__(self, field: str, message: str | None = None):
        self.field = field
        super().__init__(message or f"manifest field missing: {field}")


class DimensionalityWarning(UserWarning):
    """Estimator variance is expected to blow up at this dimension."""

