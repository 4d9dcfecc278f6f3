"""Per-check verification reports."""

from decimal import Decimal
from enum import Enum
from typing import Any

import mpmath
from pydantic import BaseModel, Field, model_validator


class Provenance(str, Enum):
    """Where the expected value of a check comes from."""

    PAPER = "PAPER"
    TRIVIAL = "TRIVIAL"
    DERIVED = "DERIVED"


def to_decimal_str(value: Any, digits: int = 20) -> str:
    """Render a number as a base-10 string; complex values keep both parts."""
    if isinstance(value, str):
        return value
    if isinstance(value, bool):
        return str(value).lower()
    if isinstance(value, (int, Decimal)):
        return str(value)
    if isinstance(value, (complex, mpmath.mpc)) or hasattr(value, "precision_bits"):
        z = mpmath.mpc(getattr(value, "value", value))
        if z.imag == 0:
            return mpmath.nstr(z.real, digits)
        sign = "+" if z.imag >= 0 else "-"
        return f"{mpmath.nstr(z.real, digits)}{sign}{mpmath.nstr(abs(z.imag), digits)}j"
    return mpmath.nstr(mpmath.mpf(value), digits)


class VerificationReport(BaseModel):
    """Outcome of one check: both sides, residual and budget."""

    check_id: str
    module: str = ""
    inputs: dict[str, str] = Field(default_factory=dict)
    lhs: str = "0"
    rhs: str = "0"
    residual: str = "0"
    budget: str = "0"
    passed: bool = Field(False, alias="pass")
    provenance: Provenance = Provenance.DERIVED
    regime_ok: bool = True
    notes: str = ""

    model_config = {"populate_by_name": True}

    @model_validator(mode="after")
    def check_pass(self) -> "VerificationReport":
        self.passed = mpmath.mpf(self.residual) <= mpmath.mpf(self.budget)
        return self

    @classmethod
    def build(
        cls,
        check_id: str,
        module: str,
        inputs: dict[str, Any],
        lhs: Any,
        rhs: Any,
        residual: Any,
        budget: Any,
        provenance: Provenance = Provenance.DERIVED,
        regime_ok: bool = True,
        notes: str = "",
    ) -> "VerificationReport":
        """Build a report, stringifying numbers; ``pass`` is derived from residual <= budget."""
        return cls(
            check_id=check_id,
            module=module,
            inputs={k: to_decimal_str(v) for k, v in sorted(inputs.items())},
            lhs=to_decimal_str(lhs),
            rhs=to_decimal_str(rhs),
            residual=to_decimal_str(residual),
            budget=to_decimal_str(budget),
            provenance=provenance,
            regime_ok=regime_ok,
            notes=notes,
        )

    def to_json_dict(self) -> dict[str, Any]:
        return self.model_dump(by_alias=True, mode="json")

    def __str__(self) -> str:
        status = "PASS" if self.passed else "FAIL"
        return f"[{status}] {self.check_id}: residual={self.residual} budget={self.budget}"
