"""Parameters and samples of the harmonic weights H(t) and W(t)."""

import math
from typing import ClassVar, Optional

from pydantic import BaseModel, Field, field_validator, model_validator


class WeightParams(BaseModel):
    """Parameters of the smooth restriction W(t).

    ``smoothing_degree`` is the exponent 2N of the two ``1 - exp(-x^(2N))``
    factors. :meth:`scaled` builds the desk-scale choice 2*ceil(m/alpha).
    """

    T: float = Field(..., gt=0, description="Spectral parameter of f")
    alpha: float = Field(..., gt=0, lt=1, description="Window exponent")
    smoothing_degree: int = Field(
        ..., ge=2, description="Even exponent 2N of the smoothing factors"
    )

    @field_validator("smoothing_degree")
    @classmethod
    def validate_even(cls, v: int) -> int:
        """Smoothing degree must be even so that W is even in t."""
        if v % 2:
            raise ValueError(f"smoothing_degree must be even, got {v}")
        return v

    @classmethod
    def scaled(cls, T: float, alpha: float, m: int = 20) -> "WeightParams":
        """Desk-scale smoothing degree 2*ceil(m/alpha)."""
        return cls(T=T, alpha=alpha, smoothing_degree=2 * math.ceil(m / alpha))

    @property
    def plateau(self) -> tuple[float, float]:
        """Interval T^(1-alpha/4) < t < 2T - T^(1-alpha/4) on which W is ~1."""
        edge = self.T ** (1 - self.alpha / 4)
        return edge, 2 * self.T - edge

    @property
    def wrange(self) -> tuple[float, float]:
        """Interval T^(1-alpha) < t < 2T - T^(1-alpha) where the derivative budgets apply."""
        edge = self.T ** (1 - self.alpha)
        return edge, 2 * self.T - edge


class WeightSample(BaseModel):
    """One row of a weight sweep."""

    t: float
    H_exact: float = Field(..., ge=0)
    H_asymptotic: float = Field(..., ge=0)
    W: float = Field(..., ge=0, le=1)
    q: float = Field(..., ge=0)
    underflow: bool = Field(False, description="H_exact is a certified upper bound, not a value")
    rel_err: Optional[float] = None

    @model_validator(mode="after")
    def check_rel_err(self) -> "WeightSample":
        if self.rel_err is None and self.H_exact > 0:
            self.rel_err = abs(self.H_asymptotic - self.H_exact) / self.H_exact
        return self

    def csv_row(self) -> list:
        return [self.t, self.H_exact, self.H_asymptotic, self.rel_err, self.W, self.q]

    CSV_HEADER: ClassVar[list[str]] = ["t", "H_exact", "H_asym", "rel_err", "W", "q"]
