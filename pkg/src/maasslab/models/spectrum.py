"""Maass cusp form records and spectrum files."""

from decimal import Decimal
from enum import Enum
from typing import Optional

from pydantic import BaseModel, Field, field_validator, model_validator


class Parity(str, Enum):
    EVEN = "even"
    ODD = "odd"


class MaassFormRecord(BaseModel):
    """One level-1 Hecke-Maass cusp form.

    Eigenvalues are kept as exact decimals so that a load/dump/load cycle is
    the identity; arithmetic converts them to mpmath numbers on demand.
    """

    t_j: Decimal = Field(..., gt=0, description="Spectral parameter; eigenvalue 1/4 + t_j^2")
    parity: Parity
    lam: tuple[Decimal, ...] = Field(..., description="Hecke eigenvalues lambda_j(n), n = 1..n_max")
    L1_sym2: Optional[Decimal] = Field(None, gt=0, description="L(1, sym^2 u_j) when provided")
    provenance: str = ""

    @property
    def n_max(self) -> int:
        return len(self.lam)

    def eigenvalue(self, n: int) -> float:
        """lambda_j(n) for n != 0, with lambda_j(-n) = +-lambda_j(n) by parity."""
        if n == 0:
            raise ValueError("lambda_j(0) is undefined")
        value = float(self.lam[abs(n) - 1])
        if n < 0 and self.parity is Parity.ODD:
            return -value
        return value

    def __str__(self) -> str:
        return f"form t={self.t_j} {self.parity.value} n_max={self.n_max}"


class SpectrumFile(BaseModel):
    """A level-1 spectrum window."""

    level: int = Field(1, ge=1)
    t_max: Decimal = Field(..., ge=0)
    complete: bool = Field(False, description="All forms with t_j <= t_max are present")
    records: tuple[MaassFormRecord, ...] = ()

    @field_validator("records")
    @classmethod
    def sort_records(cls, v: tuple[MaassFormRecord, ...]) -> tuple[MaassFormRecord, ...]:
        return tuple(sorted(v, key=lambda r: r.t_j))

    @model_validator(mode="after")
    def check_window(self) -> "SpectrumFile":
        for record in self.records:
            if record.t_j > self.t_max:
                raise ValueError(f"record t={record.t_j} lies above t_max={self.t_max}")
        return self


class ValidationFailure(BaseModel):
    """One violated relation of a record."""

    relation: str = Field(..., description="hecke_identity | hecke_multiplicative | kim_sarnak")
    indices: tuple[int, ...] = ()
    discrepancy: float = 0.0
    detail: str = ""

    def __str__(self) -> str:
        return f"{self.relation}{list(self.indices)}: {self.detail} (|diff|={self.discrepancy:.3e})"
