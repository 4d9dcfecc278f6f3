"""Coefficient tables and Kloosterman queries."""

from typing import Optional

from pydantic import BaseModel, ConfigDict, Field, field_validator


class KloostermanQuery(BaseModel):
    """Arguments of S(n, m, c)."""

    model_config = ConfigDict(frozen=True)

    n: int
    m: int
    c: int = Field(..., ge=1, description="Modulus")


class CoefficientTable(BaseModel):
    """GL(3) coefficients A_f(n, 1) for 1 <= n <= n_max.

    Values are stored 0-based internally; indexing the table is 1-based, so
    ``table[1] == 1``.
    """

    model_config = ConfigDict(frozen=True)

    source_form_id: str = Field(..., description="Identifier of the GL(2) source")
    A1: tuple[float, ...] = Field(..., description="A_f(n, 1) for n = 1..n_max")
    eisenstein_t: Optional[float] = Field(
        None, description="Spectral parameter when the table is the Eisenstein lift"
    )

    @field_validator("A1")
    @classmethod
    def validate_first(cls, v: tuple[float, ...]) -> tuple[float, ...]:
        if not v:
            raise ValueError("coefficient table is empty")
        if abs(v[0] - 1.0) > 1e-12:
            raise ValueError(f"A1[1] must be 1, got {v[0]}")
        return v

    @property
    def n_max(self) -> int:
        return len(self.A1)

    def __getitem__(self, n: int) -> float:
        if n < 1 or n > len(self.A1):
            raise IndexError(n)
        return self.A1[n - 1]

    def __str__(self) -> str:
        return f"CoefficientTable({self.source_form_id}, n_max={self.n_max})"
