"""Specifications of AFE kernels and gamma factors."""

import math
from typing import Literal, Optional

from pydantic import BaseModel, ConfigDict, Field

KernelKind = Literal["V1", "V2", "V1plus", "V1minus"]


class GammaFactor(BaseModel):
    """Gamma factors of the two L-functions in the fourth moment.

    G1(s) = prod Gamma_R(s +- it);
    G2(s) = prod Gamma_R(s +- it + 2iT) Gamma_R(s +- it) Gamma_R(s +- it - 2iT).
    """

    model_config = ConfigDict(frozen=True)

    which: Literal["G1", "G2"]
    t: float
    T: float = 0.0

    @property
    def shifts(self) -> tuple[float, ...]:
        """Imaginary shifts theta with G(s) = prod Gamma_R(s + i theta)."""
        if self.which == "G1":
            return (self.t, -self.t)
        T2 = 2 * self.T
        return (self.t + T2, -self.t + T2, self.t, -self.t, self.t - T2, -self.t - T2)


class AfeKernelSpec(BaseModel):
    """A vertical-line kernel (1/2 pi i) int e^{s^2} (x scale)^{-s} G(1/2+s)/G(1/2) ds/s."""

    model_config = ConfigDict(frozen=True)

    kind: KernelKind
    t: float
    T: float = Field(..., gt=0)
    beta: float = Field(0.01, gt=0, lt=1, description="AFE split exponent, X = T^beta")
    sigma: float = Field(1.0, gt=0, description="Contour abscissa")
    im_cut: Optional[float] = Field(None, gt=0, description="Truncation of |Im s|")
    step: float = Field(0.1, gt=0, le=0.5, description="Trapezoid step on the contour")

    def resolved_im_cut(self, precision_bits: int) -> float:
        """Default truncation max(30, sqrt(bits ln 2))."""
        if self.im_cut is not None:
            return self.im_cut
        return max(30.0, math.sqrt(precision_bits * math.log(2)))

    @property
    def gamma_factor(self) -> GammaFactor:
        return GammaFactor(which="G2" if self.kind == "V2" else "G1", t=self.t, T=self.T)

    @property
    def scale(self) -> float:
        """Extra factor of x: T^beta for V1plus, T^-beta for V1minus, 1 otherwise."""
        if self.kind == "V1plus":
            return self.T**self.beta
        if self.kind == "V1minus":
            return self.T ** (-self.beta)
        return 1.0
