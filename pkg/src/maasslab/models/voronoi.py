"""GL(3) Voronoi kernel samples and Psi transform specifications."""

import math
from typing import Any, Literal

from pydantic import BaseModel, ConfigDict, Field, model_validator


class VoronoiKernelPoint(BaseModel):
    """G+-(s) at one contour point."""

    model_config = ConfigDict(frozen=True, arbitrary_types_allowed=True)

    s: Any = Field(..., description="ComplexAP evaluation point")
    T: float = Field(..., gt=0)
    plus_value: Any
    minus_value: Any


class PsiPmSpec(BaseModel):
    """Arguments of Psi+-(y, z; u) together with the scale data N, M, T.

    The y range is the window on which Z(2 pi y sqrt(xi x)) can be nonzero for
    xi, x in (1, 2): roughly T^-alpha/(4 pi) < y < 1/pi, widened by T^eps.
    """

    model_config = ConfigDict(frozen=True)

    y: float = Field(..., gt=0)
    z: float = Field(..., gt=0)
    u: float = 0.0
    sign: Literal["+", "-"] = "+"
    N: float = Field(..., gt=0)
    M: float = Field(..., gt=0)
    T: float = Field(..., gt=1)
    alpha: float = Field(0.2, gt=0, lt=1, description="Window exponent of Z")
    eps: float = Field(0.05, gt=0, lt=0.5)

    @model_validator(mode="after")
    def check_ranges(self) -> "PsiPmSpec":
        y_lo = self.T ** (-self.alpha - self.eps) / (4 * math.pi)
        y_hi = self.T**self.eps / math.pi
        if not y_lo <= self.y <= y_hi:
            raise ValueError(f"y={self.y} outside enforced range [{y_lo:.4g}, {y_hi:.4g}]")
        if self.z > self.T**self.eps:
            raise ValueError(f"z={self.z} exceeds T^eps={self.T ** self.eps:.4g}")
        return self
