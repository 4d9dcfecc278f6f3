"""Extended-precision log-gamma, the completed factor Gamma_R and Stirling envelopes.

ln_gamma shifts the argument into Re z >= R with the recurrence and then sums
the asymptotic Stirling series, choosing R and the number of terms from the
working precision. Everything downstream (weights, AFE kernels, Voronoi
kernels, Bessel series) goes through this module.
"""

import math
from functools import lru_cache
from typing import Optional, Union

import mpmath
import numpy as np
from mpmath import mp

from config.settings import settings
from maasslab.errors import DomainError, PoleError, PrecisionExhaustedError, QuadratureBudgetError
from maasslab.models import ComplexAP, StirlingApprox
from maasslab.utils.logger import get_logger

logger = get_logger(__name__)

Numeric = Union[int, float, complex, mpmath.mpf, mpmath.mpc, ComplexAP]


def _to_mpc(z: Numeric) -> mpmath.mpc:
    if isinstance(z, ComplexAP):
        return z.value
    return mp.mpc(z)


def _bits_of(z: Numeric, precision_bits: Optional[int]) -> int:
    if precision_bits is not None:
        return precision_bits
    if isinstance(z, ComplexAP):
        return z.precision_bits
    return settings.default_precision_bits


@lru_cache(maxsize=None)
def _stirling_coefficients(count: int) -> tuple:
    """B_2k / (2k (2k-1)) for k = 1..count, exact rationals as mpf at 4096 bits."""
    with mp.workprec(4096):
        return tuple(mp.bernoulli(2 * k) / (2 * k * (2 * k - 1)) for k in range(1, count + 1))


def _is_nonpositive_integer(z: mpmath.mpc) -> bool:
    return z.imag == 0 and z.real <= 0 and z.real == mp.floor(z.real)


def _ln_gamma_upper(z: mpmath.mpc, bits: int) -> mpmath.mpc:
    """Principal ln Gamma for Im z >= 0 at the current working precision."""
    R = max(20, int(0.12 * bits) + 2)
    shift = mp.mpc(0)
    w = z
    if not (abs(z) >= R and z.real >= 0.5):
        n = max(0, int(mp.ceil(R - z.real)))
        for k in range(n):
            shift += mp.log(z + k)
        w = z + n
    tol = mp.mpf(2) ** (-(bits + 10))
    log_w = mp.log(w)
    result = (w - mp.mpf(0.5)) * log_w - w + mp.log(2 * mp.pi) / 2
    inv_w2 = 1 / (w * w)
    power = 1 / w
    coefficients = _stirling_coefficients(max(8, bits // 4))
    for k, coefficient in enumerate(coefficients):
        term = coefficient * power
        result += term
        if abs(term) < tol * max(1, abs(result)):
            break
        power *= inv_w2
    else:
        logger.debug(
            f"Stirling series used all {len(coefficients)} terms at |w|={mpmath.nstr(abs(w), 5)}"
        )
    return result - shift


def ln_gamma_mp(z: Numeric) -> mpmath.mpc:
    """ln Gamma(z) at the ambient mpmath precision (no ComplexAP wrapping)."""
    z = _to_mpc(z)
    if _is_nonpositive_integer(z):
        raise PoleError(f"Gamma has a pole at {mpmath.nstr(z.real, 10)}", point=z)
    bits = mp.prec
    magnitude = float(abs(z))
    guard = 10
    if magnitude > 2:
        guard += int(math.log2(magnitude * math.log(magnitude))) + 1
    with mp.workprec(bits + guard):
        if z.imag < 0:
            value = mp.conj(_ln_gamma_upper(mp.conj(z), bits))
        else:
            value = _ln_gamma_upper(z, bits)
    return +value


def ln_gamma(z: Numeric, precision_bits: Optional[int] = None) -> ComplexAP:
    """Principal-branch ln Gamma(z).

    Args:
        z: Evaluation point; a ComplexAP carries its own precision
        precision_bits: Overrides the precision of ``z``

    Returns:
        ComplexAP whose exponential equals Gamma(z) to relative error 2^(8-bits)

    Raises:
        PoleError: z is a nonpositive integer
        PrecisionExhaustedError: bits exceed ``settings.max_precision_bits``
    """
    bits = _bits_of(z, precision_bits)
    if bits > settings.max_precision_bits:
        raise PrecisionExhaustedError("ln_gamma precision above configured ceiling", bits)
    with mp.workprec(bits):
        return ComplexAP(ln_gamma_mp(z), bits)


def ln_gamma_R_mp(s: Numeric) -> mpmath.mpc:
    s = _to_mpc(s)
    return -(s / 2) * mp.log(mp.pi) + ln_gamma_mp(s / 2)


def gamma_R_mp(s: Numeric) -> mpmath.mpc:
    return mp.exp(ln_gamma_R_mp(s))


def gamma_R(s: Numeric, precision_bits: Optional[int] = None) -> ComplexAP:
    """Gamma_R(s) = pi^(-s/2) Gamma(s/2)."""
    bits = _bits_of(s, precision_bits)
    with mp.workprec(bits):
        return ComplexAP(gamma_R_mp(s), bits)


def stirling_main_log(sigma: float, gamma_im: float) -> mpmath.mpc:
    """Logarithm of the first-order Stirling value of Gamma(sigma + i gamma)."""
    sigma = mp.mpf(sigma)
    g = mp.mpf(gamma_im)
    a = abs(g)
    modulus = mp.log(2 * mp.pi) / 2 + (sigma - mp.mpf(0.5)) * mp.log(1 + a) - mp.pi * a / 2
    if g == 0:
        return mp.mpc(modulus, 0)
    phase = g * mp.log(a) - g + mp.sign(g) * (mp.pi / 2) * (sigma - mp.mpf(0.5))
    return mp.mpc(modulus, phase)


def stirling_envelope(
    sigma: float,
    gamma_im: float,
    precision_bits: Optional[int] = None,
    constant: Optional[float] = None,
) -> StirlingApprox:
    """First-order Stirling approximation of Gamma(sigma + i gamma) and its envelope C/(1+|gamma|).

    The constant defaults to ``settings.stirling_constant`` (10), calibrated
    for 0 < sigma <= 3.
    """
    if sigma <= 0:
        raise DomainError(f"stirling_envelope needs sigma > 0, got {sigma}")
    bits = precision_bits or settings.default_precision_bits
    C = settings.stirling_constant if constant is None else constant
    with mp.workprec(bits):
        main = ComplexAP(mp.exp(stirling_main_log(sigma, gamma_im)), bits)
    return StirlingApprox(main_term=main, relative_error_bound=C / (1 + abs(gamma_im)), constant=C)


def stirling_relative_error(
    sigma: float, gamma_im: float, precision_bits: Optional[int] = None
) -> float:
    """|Gamma - main| / |Gamma| computed in log space, so huge |gamma| does not underflow."""
    bits = precision_bits or settings.default_precision_bits
    with mp.workprec(bits):
        delta = stirling_main_log(sigma, gamma_im) - ln_gamma_mp(mp.mpc(sigma, gamma_im))
        return float(abs(mp.expm1(delta.real) * mp.expj(delta.imag) + (mp.expj(delta.imag) - 1)))


def reflection_defect(gamma_im: float, precision_bits: Optional[int] = None) -> float:
    """| |Gamma(1/2 + i gamma)|^2 cosh(pi gamma) / pi - 1 |."""
    bits = precision_bits or settings.default_precision_bits
    with mp.workprec(bits):
        lg = ln_gamma_mp(mp.mpc(0.5, gamma_im))
        g = mp.mpf(gamma_im)
        # log cosh(pi g) = pi|g| + log((1 + e^{-2 pi |g|})/2)
        log_cosh = mp.pi * abs(g) + mp.log1p(mp.exp(-2 * mp.pi * abs(g))) - mp.log(2)
        return float(abs(mp.expm1(2 * lg.real + log_cosh - mp.log(mp.pi))))


# ---------------------------------------------------------------------------
# double-precision bulk path


_NP_SHIFT = 15.0
_NP_COEFFS = np.array([float(c) for c in _stirling_coefficients(10)])


def ln_gamma_array(z: np.ndarray) -> np.ndarray:
    """Vectorised principal ln Gamma in complex128 (about 1e-14 absolute accuracy).

    Used for the bulk contour sums of the Voronoi module, where double
    precision is sufficient and thousands of nodes are needed.
    """
    z = np.asarray(z, dtype=np.complex128)
    if np.any((z.imag == 0) & (z.real <= 0) & (z.real == np.floor(z.real))):
        raise PoleError("Gamma has a pole on the requested grid")
    conj = z.imag < 0
    w = np.where(conj, np.conj(z), z)
    n_shift = np.maximum(0, np.ceil(_NP_SHIFT - w.real)).astype(int)
    shift = np.zeros_like(w)
    for k in range(int(n_shift.max()) if n_shift.size else 0):
        active = k < n_shift
        shift[active] += np.log(w[active] + k)
    w = w + n_shift
    result = (w - 0.5) * np.log(w) - w + 0.5 * math.log(2 * math.pi)
    inv_w2 = 1.0 / (w * w)
    power = 1.0 / w
    for coefficient in _NP_COEFFS:
        result += coefficient * power
        power *= inv_w2
    result -= shift
    return np.where(conj, np.conj(result), result)


def ln_gamma_R_array(s: np.ndarray) -> np.ndarray:
    s = np.asarray(s, dtype=np.complex128)
    return -(s / 2) * math.log(math.pi) + ln_gamma_array(s / 2)


# ---------------------------------------------------------------------------
# Mellin transform of K_{iT}(y)^2


def _series_coefficients(order: mpmath.mpc, terms: int) -> list:
    """(1/2)^(2k + order) / (k! Gamma(k + order + 1)) for k < terms."""
    return [
        mp.mpf(0.5) ** (2 * k + order) / (mp.factorial(k) * mp.exp(ln_gamma_mp(k + order + 1)))
        for k in range(terms)
    ]


def _kbessel_sq_left_series(s: mpmath.mpc, T: mpmath.mpf) -> mpmath.mpc:
    """int_0^1 y^(s-1) K_{iT}(y)^2 dy from the I_{+-iT} power series, term by term."""
    nu = mp.mpc(0, T)
    terms = 40
    tol = mp.mpf(2) ** (-mp.prec)
    while True:
        a_plus = _series_coefficients(nu, terms)
        a_minus = _series_coefficients(-nu, terms)
        if abs(a_plus[-1]) < tol * abs(a_plus[0]):
            break
        terms *= 2
    C = mp.pi / (2j * mp.sinh(mp.pi * T))
    total = mp.mpc(0)
    for n in range(terms):
        b = mp.fsum(a_minus[k] * a_minus[n - k] for k in range(n + 1))
        c = mp.fsum(a_plus[k] * a_minus[n - k] for k in range(n + 1))
        d = mp.fsum(a_plus[k] * a_plus[n - k] for k in range(n + 1))
        total += b / (s + 2 * n - 2 * nu) - 2 * c / (s + 2 * n) + d / (s + 2 * n + 2 * nu)
    return C * C * total


def kbessel_mellin_rhs(s: Numeric, T: float) -> mpmath.mpc:
    """2^(s-3) Gamma(s/2)^2 Gamma(s/2 + iT) Gamma(s/2 - iT) / Gamma(s)."""
    s = _to_mpc(s)
    half = s / 2
    log_value = (
        (s - 3) * mp.log(2)
        + 2 * ln_gamma_mp(half)
        + ln_gamma_mp(half + mp.mpc(0, T))
        + ln_gamma_mp(half - mp.mpc(0, T))
        - ln_gamma_mp(s)
    )
    return mp.exp(log_value)


def kbessel_mellin_identity(
    s: Numeric, T: float, precision_bits: Optional[int] = None
) -> tuple[ComplexAP, ComplexAP]:
    """Both sides of int_0^oo y^s K_{iT}(y)^2 dy/y = 2^(s-3) Gamma(s/2)^2 Gamma(s/2+-iT) / Gamma(s).

    The lhs splits at y = 1: the piece on (0, 1] is integrated exactly from the
    power series of I_{+-iT}; the piece on [1, y_max] uses Gauss-Legendre on
    geometric panels with K from :mod:`maasslab.core.bessel`. The discarded tail
    beyond y_max is bounded by the asymptotic e^(-2y) decay of K^2.

    Raises:
        DomainError: Re s <= 0 or T < 0
        QuadratureBudgetError: the panel error estimate misses the budget
    """
    from maasslab.core.bessel import bessel_K_mp

    bits = _bits_of(s, precision_bits)
    s = _to_mpc(s)
    if s.real <= 0:
        raise DomainError(f"Mellin integral diverges for Re s = {s.real}")
    if T < 0:
        raise DomainError("T must be nonnegative")
    with mp.workprec(bits):
        rhs = kbessel_mellin_rhs(s, T)

    work_bits = bits + int(2 * math.pi * T * 1.45) + 20
    with mp.workprec(work_bits):
        Tm = mp.mpf(T)
        if T == 0:
            left = mp.quad(
                lambda y: y ** (s - 1) * bessel_K_mp(0, y) ** 2,
                [0, mp.mpf(0.25), 1],
                method="tanh-sinh",
            )
        else:
            left = _kbessel_sq_left_series(s, Tm)
        y_max = 0.5 * (bits * math.log(2) + math.pi * T + 2 * abs(float(s.real)) * math.log(60)) + 2
        y_max = max(y_max, 2.0 * T + 10)
        result = mp.quad(
            lambda y: y ** (s - 1) * bessel_K_mp(Tm / 2, y) ** 2,
            [mp.mpf(p) for p in _panels(1.0, y_max)],
            method="gauss-legendre",
            error=True,
        )
        right, err = result
        tail = mp.pi / 2 * y_max ** (abs(s.real) - 1) * mp.exp(-2 * y_max)
        logger.debug(
            f"K-Mellin s={mpmath.nstr(s, 6)} T={T}: y_max={y_max:.1f} "
            f"panel err={mpmath.nstr(err, 3)} tail={mpmath.nstr(tail, 3)}"
        )
        budget = abs(rhs) * mp.mpf(2) ** (-bits // 2)
        if err + tail > budget:
            raise QuadratureBudgetError(
                "K-Bessel Mellin integral", float(err + tail), float(budget)
            )
        lhs = left + right
    with mp.workprec(bits):
        return ComplexAP(+lhs, bits), ComplexAP(+rhs, bits)


def _panels(a: float, b: float, ratio: float = 1.2) -> list[float]:
    points = [a]
    width = 0.5
    while points[-1] + width < b:
        points.append(points[-1] + width)
        width = min(width * ratio, 2.0)
    points.append(b)
    return points
