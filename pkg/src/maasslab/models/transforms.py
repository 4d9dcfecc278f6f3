"""Test functions for Bessel-type transforms."""

import math
from typing import Literal

from pydantic import BaseModel, ConfigDict, Field


class TransformSpec(BaseModel):
    """An even test function h(t/T) from the log-bump family plus a quadrature budget.

    The bump is supported on (T^-alpha, T^alpha) and its mirror image.
    """

    model_config = ConfigDict(frozen=True)

    T: float = Field(..., gt=1)
    alpha: float = Field(..., gt=0, lt=1)
    family: Literal["logbump"] = "logbump"
    precision_bits: int = Field(512, ge=64)
    quadrature: Literal["gauss-legendre", "tanh-sinh"] = "gauss-legendre"
    node_budget: int = Field(24, ge=4, description="Gauss-Legendre panels across the support")

    @property
    def support(self) -> tuple[float, float]:
        return self.T ** (-self.alpha), self.T**self.alpha


class BumpSpec(BaseModel):
    """A bump Phi(w) supported on (X^-1 e^-width, X^-1 e^width) with height Y.

    ``width`` defaults to eps * ln T, the desk-scale T^eps window.
    """

    model_config = ConfigDict(frozen=True)

    X: float = Field(..., gt=0)
    Y: float = Field(1.0, gt=0)
    T: float = Field(100.0, gt=1)
    eps: float = Field(0.05, gt=0, lt=1)
    width: float | None = Field(None, gt=0)
    kind: Literal["logbump"] = "logbump"

    @property
    def half_width(self) -> float:
        return self.width if self.width is not None else self.eps * math.log(self.T)

    @property
    def support(self) -> tuple[float, float]:
        w = self.half_width
        return math.exp(-w) / self.X, math.exp(w) / self.X
