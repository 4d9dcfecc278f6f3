"""Exception hierarchy for the laboratory.

Every library failure derives from :class:`MaassLabError`. The CLI maps the
configuration and data errors to exit code 2 and check failures to exit code 1.
"""

from typing import Optional


class MaassLabError(RuntimeError):
    """Base error for all laboratory failures."""


class PoleError(MaassLabError, ValueError):
    """Evaluation requested at a pole (gamma, zeta or a contour crossing one)."""

    def __init__(self, message: str, point: Optional[object] = None):
        super().__init__(message)
        self.point = point


class PrecisionExhaustedError(MaassLabError):
    """The estimated cancellation loss needs more bits than the configured ceiling."""

    def __init__(self, message: str, required_bits: int):
        super().__init__(f"{message} (requires ~{required_bits} bits)")
        self.required_bits = required_bits


class QuadratureBudgetError(MaassLabError):
    """A quadrature or truncated sum cannot meet its error budget."""

    def __init__(self, message: str, estimate: float = float("nan"), budget: float = float("nan")):
        super().__init__(f"{message}: estimate {estimate:.3e} > budget {budget:.3e}")
        self.estimate = estimate
        self.budget = budget


class DomainError(MaassLabError, ValueError):
    """An argument lies outside the range an operation is defined on."""


class InsufficientDataError(MaassLabError):
    """Coefficient or eigenvalue tables are too short for the request."""

    def __init__(self, message: str, needed: Optional[int] = None, available: Optional[int] = None):
        if needed is not None:
            message = f"{message} (need index {needed}, have {available})"
        super().__init__(message)
        self.needed = needed
        self.available = available


class TableExhaustedError(InsufficientDataError):
    """A Hecke expansion reached past the end of a coefficient table."""


class SpectrumParseError(MaassLabError):
    """A spectrum file line does not follow the schema."""

    def __init__(self, message: str, line_no: int):
        super().__init__(f"line {line_no}: {message}")
        self.line_no = line_no


class SpectrumValidationError(MaassLabError):
    """A Maass form record violates a structural relation."""

    def __init__(self, message: str, relation: str):
        super().__init__(f"{relation}: {message}")
        self.relation = relation


class IncompleteSpectrumError(MaassLabError):
    """Trace-formula truncation needs a spectrum flagged complete."""


class UnsupportedLevelError(MaassLabError):
    """Only level 1 spectral data is supported."""


class ConfigError(MaassLabError):
    """Invalid run configuration."""
