"""Arbitrary-precision complex values that remember their precision."""

from dataclasses import dataclass
from typing import Union

import mpmath
from mpmath import mp

Number = Union[int, float, complex, "mpmath.mpf", "mpmath.mpc", "ComplexAP"]

MIN_PRECISION_BITS = 64


@dataclass(frozen=True)
class ComplexAP:
    """A complex number held at an explicit binary precision.

    Arithmetic between two values runs at the smaller of the two precisions and
    the result records it. Plain Python or mpmath numbers are promoted at the
    precision of the ComplexAP operand.
    """

    value: mpmath.mpc
    precision_bits: int

    def __post_init__(self):
        if self.precision_bits < MIN_PRECISION_BITS:
            raise ValueError(
                f"precision_bits must be >= {MIN_PRECISION_BITS}, got {self.precision_bits}"
            )

    @classmethod
    def of(cls, x: Number, precision_bits: int) -> "ComplexAP":
        """Build a value at ``precision_bits`` from any numeric input."""
        if isinstance(x, ComplexAP):
            x = x.value
        with mp.workprec(precision_bits):
            return cls(mp.mpc(x), precision_bits)

    @property
    def re(self) -> mpmath.mpf:
        return self.value.real

    @property
    def im(self) -> mpmath.mpf:
        return self.value.imag

    def _coerce(self, other: Number) -> tuple[mpmath.mpc, int]:
        if isinstance(other, ComplexAP):
            return other.value, min(self.precision_bits, other.precision_bits)
        return other, self.precision_bits

    def _binary(self, other: Number, op) -> "ComplexAP":
        rhs, bits = self._coerce(other)
        with mp.workprec(bits):
            return ComplexAP(mp.mpc(op(self.value, rhs)), bits)

    def __add__(self, other: Number) -> "ComplexAP":
        return self._binary(other, lambda a, b: a + b)

    __radd__ = __add__

    def __sub__(self, other: Number) -> "ComplexAP":
        return self._binary(other, lambda a, b: a - b)

    def __rsub__(self, other: Number) -> "ComplexAP":
        return self._binary(other, lambda a, b: b - a)

    def __mul__(self, other: Number) -> "ComplexAP":
        return self._binary(other, lambda a, b: a * b)

    __rmul__ = __mul__

    def __truediv__(self, other: Number) -> "ComplexAP":
        return self._binary(other, lambda a, b: a / b)

    def __rtruediv__(self, other: Number) -> "ComplexAP":
        return self._binary(other, lambda a, b: b / a)

    def __neg__(self) -> "ComplexAP":
        return ComplexAP(-self.value, self.precision_bits)

    def conjugate(self) -> "ComplexAP":
        return ComplexAP(mp.conj(self.value), self.precision_bits)

    def __abs__(self) -> mpmath.mpf:
        with mp.workprec(self.precision_bits):
            return abs(self.value)

    def __complex__(self) -> complex:
        return complex(self.value)

    def __str__(self) -> str:
        digits = max(15, int(self.precision_bits * 0.30103))
        return mpmath.nstr(self.value, digits)


@dataclass(frozen=True)
class StirlingApprox:
    """First-order Stirling value of Gamma(sigma + i gamma) with its claimed envelope."""

    main_term: ComplexAP
    relative_error_bound: float
    constant: float

    def __post_init__(self):
        if self.relative_error_bound < 0:
            raise ValueError("relative_error_bound must be nonnegative")
