"""Kuznetsov trace-formula queries and ledgers."""

from typing import Literal, Optional

from pydantic import BaseModel, ConfigDict, Field, model_validator

from .spectrum import SpectrumFile


class GaussianPolyTerm(BaseModel):
    """coef * exp(-(t/A)^2) * prod_{k<K} (t^2 + (k+1/2)^2)."""

    model_config = ConfigDict(frozen=True)

    coef: float = 1.0
    A: float = Field(..., gt=0, description="Gaussian width")
    K: int = Field(0, ge=0, description="Number of zero pairs at +-i(k+1/2)")


class TraceQuery(BaseModel):
    """One evaluation of the Kuznetsov formula."""

    model_config = ConfigDict(frozen=True, arbitrary_types_allowed=True)

    n: int = Field(..., ge=1)
    m: int = Field(..., ge=1)
    sign: Literal["+", "-"] = "+"
    h: tuple[GaussianPolyTerm, ...] = Field(..., min_length=1)
    spectrum: SpectrumFile
    c_max: Optional[int] = Field(
        None, ge=1, description="Fixed truncation; None grows it adaptively"
    )

    @classmethod
    def gaussian(
        cls,
        n: int,
        m: int,
        sign: str,
        spectrum: SpectrumFile,
        A: float,
        K: int = 0,
        c_max: Optional[int] = None,
    ) -> "TraceQuery":
        h = (GaussianPolyTerm(A=A, K=K),)
        return cls(n=n, m=m, sign=sign, h=h, spectrum=spectrum, c_max=c_max)

    @property
    def zero_pairs(self) -> int:
        """Common number of cancelled residues across all terms."""
        return min(term.K for term in self.h)


class TraceLedger(BaseModel):
    """Both sides of the Kuznetsov formula with an explicit truncation budget."""

    n: int
    m: int
    sign: str
    spectral_cusp: float
    spectral_eis: float
    delta_term: float
    kloosterman_sum: float
    residual: float = 0.0
    spectral_tail: float = Field(0.0, ge=0)
    c_tail: float = Field(0.0, ge=0)
    quadrature_error: float = Field(0.0, ge=0)
    truncation_budget: float = Field(0.0, ge=0)
    c_max: int = 0

    @model_validator(mode="after")
    def assemble(self) -> "TraceLedger":
        self.residual = abs(
            (self.spectral_cusp + self.spectral_eis) - (self.delta_term + self.kloosterman_sum)
        )
        self.truncation_budget = self.spectral_tail + self.c_tail + self.quadrature_error
        return self

    @property
    def largest_term(self) -> float:
        return max(
            abs(self.spectral_cusp),
            abs(self.spectral_eis),
            abs(self.delta_term),
            abs(self.kloosterman_sum),
        )

    @property
    def passed(self) -> bool:
        return self.residual <= self.truncation_budget

    def __str__(self) -> str:
        return (
            f"ledger(n={self.n}, m={self.m}, {self.sign}): residual={self.residual:.3e} "
            f"budget={self.truncation_budget:.3e}"
        )


class ExpansionLedger(BaseModel):
    """Kloosterman sums weighted by a bump against their spectral expansion at level one.

    ``holomorphic_bound``, ``maass_tail`` and ``eisenstein_tail`` bound the
    pieces that are not evaluated: holomorphic forms, Maass forms above the
    spectrum window and the continuous spectrum beyond the t cut.
    """

    n: int
    m: int
    sign: str
    level: int = 1
    c_range: tuple[int, int] = (0, -1)
    geometric: float
    maass: float = 0.0
    eisenstein: float = 0.0
    holomorphic_bound: float = Field(0.0, ge=0)
    maass_tail: float = Field(0.0, ge=0)
    eisenstein_tail: float = Field(0.0, ge=0)
    quadrature_error: float = Field(0.0, ge=0)
    localized_share: float = Field(1.0, ge=0, le=1)
    residual: float = 0.0
    truncation_budget: float = Field(0.0, ge=0)

    @model_validator(mode="after")
    def assemble(self) -> "ExpansionLedger":
        self.residual = abs(self.geometric - self.spectral)
        self.truncation_budget = (
            self.holomorphic_bound + self.maass_tail + self.eisenstein_tail + self.quadrature_error
        )
        return self

    @property
    def spectral(self) -> float:
        return self.maass + self.eisenstein

    @property
    def ratio(self) -> Optional[float]:
        """geometric / spectral; a constant away from 1 flags a normalisation mismatch."""
        return self.geometric / self.spectral if self.spectral else None

    @property
    def passed(self) -> bool:
        return self.residual <= self.truncation_budget

    def __str__(self) -> str:
        return (
            f"expansion(n={self.n}, m={self.m}, {self.sign}): residual={self.residual:.3e} "
            f"budget={self.truncation_budget:.3e}"
        )
