"""Zeta oracle, gamma factors and approximate-functional-equation kernels.

The kernels are vertical-line integrals

    V(x) = (1/2 pi i) int_(sigma) e^(s^2) (x scale)^(-s) G(1/2 + s) / G(1/2) ds / s

with G a product of Gamma_R(s + i theta). Single values are computed with an
mpmath trapezoid rule; :func:`afe_kernel_array` precomputes the contour
weights once and evaluates whole x-grids in complex128.

The identity checks use the Eisenstein analogue, where every L-function is a
product of shifted zeta values, so both sides are independently computable.
"""

import math
from typing import Callable, Optional, Sequence

import mpmath
import numpy as np
from mpmath import mp

from config.settings import settings
from maasslab.core.arith import eisenstein_sym2_coefficients, lambda_div_table
from maasslab.core.gamma import gamma_R_mp, ln_gamma_mp, ln_gamma_R_mp
from maasslab.core.quadrature import vertical_line
from maasslab.errors import DomainError, PoleError, PrecisionExhaustedError
from maasslab.models import AfeKernelSpec, ComplexAP, GammaFactor, Provenance, VerificationReport
from maasslab.utils.logger import get_logger

logger = get_logger(__name__)

MODULE = "lfun"

# e^(-gamma^2) below 1e-28 at this height; enough for complex128 sums
BULK_IM_CUT = 8.0

_CHUNK = 4096


# ---------------------------------------------------------------------------
# Riemann zeta


def zeta_mp(s) -> mpmath.mpc:
    """Euler-Maclaurin zeta(s) at the ambient precision.

    Raises PrecisionExhaustedError if the certified remainder is not below
    2^(16 - prec).
    """
    s = mp.mpc(s)
    if s == 1:
        raise PoleError("zeta has a pole at s = 1", point=s)
    bits = mp.prec
    N = max(20, int(mp.ceil(abs(s))) + 1, int(0.12 * bits))
    with mp.extraprec(20):
        total = mp.fsum(mp.power(n, -s) for n in range(1, N))
        N_mp = mp.mpf(N)
        N_pow = mp.power(N_mp, -s)
        total += N_mp * N_pow / (s - 1) + N_pow / 2
        rising = s
        power = N_pow / N_mp
        inv_N2 = 1 / (N_mp * N_mp)
        target = mp.ldexp(1, 16 - bits)
        for k in range(1, 4 * N + 50):
            term = mp.bernoulli(2 * k) / mp.factorial(2 * k) * rising * power
            total += term
            rising *= (s + 2 * k - 1) * (s + 2 * k)
            power *= inv_N2
            nxt = mp.bernoulli(2 * k + 2) / mp.factorial(2 * k + 2) * rising * power
            remainder = abs(nxt) * abs(s + 2 * k + 1) / abs(s.real + 2 * k + 1)
            if remainder <= target * max(1, abs(total)):
                break
        else:
            raise PrecisionExhaustedError(
                f"Euler-Maclaurin for zeta({mpmath.nstr(s, 8)})", 2 * bits
            )
    return +total


def zeta(s, precision_bits: Optional[int] = None) -> ComplexAP:
    """zeta(s) as a ComplexAP; valid for |Im s| <= 10^3 at default settings."""
    bits = precision_bits or getattr(s, "precision_bits", settings.default_precision_bits)
    with mp.workprec(bits):
        value = zeta_mp(getattr(s, "value", s))
        return ComplexAP(value, bits)


def completed_zeta_mp(w) -> mpmath.mpc:
    """Gamma_R(w) zeta(w); poles at w = 0 (residue -1) and w = 1 (residue 1)."""
    return gamma_R_mp(w) * zeta_mp(w)


def hardy_z(t: float) -> mpmath.mpf:
    """Real-valued Z(t) = e^(i theta(t)) zeta(1/2 + it)."""
    t = mp.mpf(t)
    theta = ln_gamma_mp(mp.mpc(0.25, t / 2)).imag - t / 2 * mp.log(mp.pi)
    return (mp.expjpi(theta / mp.pi) * zeta_mp(mp.mpc(0.5, t))).real


def zeta_zero_near(t0: float, width: float = 0.25) -> mpmath.mpf:
    """Ordinate of the zeta zero bracketed by a sign change of Z on [t0 - width, t0 + width]."""
    a, b = mp.mpf(t0) - width, mp.mpf(t0) + width
    if hardy_z(a) * hardy_z(b) > 0:
        raise DomainError(f"no sign change of Z(t) on [{a}, {b}]")
    return mp.findroot(hardy_z, (a, b), solver="illinois")


# ---------------------------------------------------------------------------
# Gamma factors


def ln_gamma_factor_mp(shifts: Sequence[float], s) -> mpmath.mpc:
    """ln prod_theta Gamma_R(s + i theta)."""
    s = mp.mpc(s)
    return mp.fsum(ln_gamma_R_mp(s + mp.mpc(0, theta)) for theta in shifts)


def gamma_factor(g: GammaFactor, s, precision_bits: Optional[int] = None) -> ComplexAP:
    """G1 (two factors) or G2 (six factors) at s."""
    bits = precision_bits or getattr(s, "precision_bits", settings.default_precision_bits)
    with mp.workprec(bits):
        value = mp.exp(ln_gamma_factor_mp(g.shifts, getattr(s, "value", s)))
        return ComplexAP(value, bits)


def parity_ratio_defect(s, t: float, precision_bits: Optional[int] = None) -> float:
    """|[G1(3/2 + s)/G1(3/2)] / [G1(1/2 + s)/G1(1/2)] - 1| for G1 with shifts +-t.

    Measures how much the AFE gamma ratio depends on the parity shift kappa.
    """
    shifts = (t, -t)
    with mp.workprec(precision_bits or settings.default_precision_bits):
        s = mp.mpc(s)
        odd = ln_gamma_factor_mp(shifts, 1.5 + s) - ln_gamma_factor_mp(shifts, 1.5)
        even = ln_gamma_factor_mp(shifts, 0.5 + s) - ln_gamma_factor_mp(shifts, 0.5)
        return float(abs(mp.expm1(odd - even)))


# ---------------------------------------------------------------------------
# AFE kernels


def _kernel_integrand(spec: AfeKernelSpec, x) -> Callable:
    shifts = spec.gamma_factor.shifts
    ln_base = ln_gamma_factor_mp(shifts, 0.5)
    ln_x = mp.log(mp.mpf(x) * spec.scale)

    def f(s: mpmath.mpc) -> mpmath.mpc:
        return mp.exp(s * s - s * ln_x + ln_gamma_factor_mp(shifts, 0.5 + s) - ln_base) / s

    return f


def afe_kernel(spec: AfeKernelSpec, x: float, precision_bits: Optional[int] = None) -> float:
    """V(x) for ``spec`` by the trapezoid rule on Re s = sigma, |Im s| <= im_cut."""
    if x <= 0:
        raise DomainError(f"afe_kernel needs x > 0, got {x}")
    bits = precision_bits or settings.default_precision_bits
    with mp.workprec(bits):
        im_cut = spec.resolved_im_cut(bits)
        value = vertical_line(_kernel_integrand(spec, x), spec.sigma, im_cut, spec.step)
        assert abs(value.imag) <= mp.ldexp(1, 24 - bits) * max(1, abs(value.real)), (
            f"kernel {spec.kind} not real: {mpmath.nstr(value, 10)}"
        )
        return float(value.real)


def _bulk_weights(
    shifts: Sequence[float], sigma: float, im_cut: float, step: float
) -> tuple[np.ndarray, np.ndarray]:
    """Nodes s_k on the upper half contour and weights c_k with V(x) = Re sum c_k x^(-s_k)."""
    n = int(math.ceil(im_cut / step))
    nodes = np.empty(n + 1, dtype=np.complex128)
    weights = np.empty(n + 1, dtype=np.complex128)
    with mp.workprec(settings.default_precision_bits):
        ln_base = ln_gamma_factor_mp(shifts, 0.5)
        h = mp.mpf(step)
        for k in range(n + 1):
            s = mp.mpc(sigma, k * h)
            c = mp.exp(s * s + ln_gamma_factor_mp(shifts, 0.5 + s) - ln_base) / s * h / mp.pi
            if k == 0:
                c /= 2
            nodes[k] = complex(s)
            weights[k] = complex(c)
    return nodes, weights


def kernel_values(
    shifts: Sequence[float],
    xs: np.ndarray,
    sigma: float = 1.0,
    step: float = 0.1,
    im_cut: float = BULK_IM_CUT,
) -> np.ndarray:
    """Bulk double-precision kernel values for G = prod Gamma_R(s + i theta)."""
    xs = np.asarray(xs, dtype=np.float64)
    if np.any(xs <= 0):
        raise DomainError("kernel arguments must be positive")
    nodes, weights = _bulk_weights(tuple(shifts), sigma, im_cut, step)
    out = np.empty(xs.shape[0], dtype=np.float64)
    ln_x = np.log(xs)
    for start in range(0, xs.shape[0], _CHUNK):
        block = ln_x[start : start + _CHUNK]
        out[start : start + _CHUNK] = (np.exp(-np.outer(block, nodes)) @ weights).real
    return out


def afe_kernel_array(spec: AfeKernelSpec, xs: Sequence[float]) -> np.ndarray:
    xs = np.asarray(xs, dtype=np.float64) * spec.scale
    im_cut = min(BULK_IM_CUT, spec.resolved_im_cut(53))
    return kernel_values(spec.gamma_factor.shifts, xs, spec.sigma, spec.step, im_cut)


def afe_kernel_leading(y: float) -> float:
    """(1/2 pi i) int e^(s^2) y^(-s) ds/s = erfc(ln y / 2) / 2."""
    if y <= 0:
        raise DomainError(f"leading kernel needs y > 0, got {y}")
    return float(mp.erfc(mp.log(y) / 2) / 2)


def leading_argument(spec: AfeKernelSpec, x: float) -> float:
    """y with G(1/2 + s)/G(1/2) ~ (x scale / y)^s: (2 pi)^(d/2) x scale / prod |theta|^(1/2)."""
    shifts = spec.gamma_factor.shifts
    conductor = math.prod(max(abs(theta), 1.0) for theta in shifts) ** 0.5
    return (2 * math.pi) ** (len(shifts) / 2) * x * spec.scale / conductor


def kernel_decay_threshold(spec: AfeKernelSpec, level: float) -> float:
    """x beyond which the leading kernel term is below ``level``."""
    if not 0 < level < 0.5:
        raise DomainError(f"level must lie in (0, 1/2), got {level}")
    with mp.workprec(128):
        ln_y = 2 * mp.erfinv(1 - 2 * mp.mpf(level))
    return float(mp.exp(ln_y)) / leading_argument(spec, 1.0)


def kernel_t_derivative(spec: AfeKernelSpec, x: float, h: float = 1e-3) -> float:
    """Central difference of V(x; t) in t."""
    plus = afe_kernel(spec.model_copy(update={"t": spec.t + h}), x)
    minus = afe_kernel(spec.model_copy(update={"t": spec.t - h}), x)
    return (plus - minus) / (2 * h)


def stirling_kernel_expansion_check(
    spec: AfeKernelSpec, x: float, alpha: float = 0.2, constant: float = 100.0
) -> VerificationReport:
    """Compare V with its leading Stirling term erfc(ln y / 2)/2.

    Only t in T^(1-alpha) < |t| < 2T - T^(1-alpha) is in range.
    """
    t, T = abs(spec.t), spec.T
    edge = T ** (1 - alpha)
    if not edge < t < 2 * T - edge:
        raise DomainError(f"t={spec.t} outside ({edge:.4g}, {2 * T - edge:.4g}) for T={T}")
    exact = afe_kernel(spec, x)
    lead = afe_kernel_leading(leading_argument(spec, x))
    budget = constant * (1 / t + 1 / abs(2 * T - t) + 1 / (2 * T + t))
    return VerificationReport.build(
        check_id=f"stirv.{spec.kind}",
        module=MODULE,
        inputs={"t": spec.t, "T": T, "x": x, "beta": spec.beta, "alpha": alpha},
        lhs=exact,
        rhs=lead,
        residual=abs(exact - lead),
        budget=budget,
        provenance=Provenance.PAPER,
    )


def kernel_envelope_bound(spec: AfeKernelSpec) -> float:
    """M = (1/2 pi) int |e^(s^2) G(1/2+s)/G(1/2) / s| |ds|, so |V(x)| <= M (x scale)^(-sigma)."""
    nodes, weights = _bulk_weights(spec.gamma_factor.shifts, spec.sigma, BULK_IM_CUT, spec.step)
    # weights already carry h/pi and the half weight at the real node
    return float(np.sum(np.abs(weights)))


def kernel_envelope_check(
    spec: AfeKernelSpec, x0: float, xs: Sequence[float]
) -> VerificationReport:
    """Audit |V(x)| <= (x/x0)^(-sigma) V_budget for x >= x0, V_budget = M (x0 scale)^(-sigma)."""
    xs = np.asarray([x for x in xs if x >= x0], dtype=np.float64)
    if xs.size == 0:
        raise DomainError(f"no grid points at or beyond x0={x0}")
    values = np.abs(afe_kernel_array(spec, xs))
    scaled = float(np.max(values * (xs / x0) ** spec.sigma))
    v_budget = kernel_envelope_bound(spec) * (x0 * spec.scale) ** (-spec.sigma)
    return VerificationReport.build(
        check_id=f"kernel_envelope.{spec.kind}",
        module=MODULE,
        inputs={"t": spec.t, "T": spec.T, "x0": x0, "points": int(xs.size), "sigma": spec.sigma},
        lhs=scaled,
        rhs=v_budget,
        residual=scaled,
        budget=v_budget * (1 + 1e-9),
        provenance=Provenance.TRIVIAL,
    )


# ---------------------------------------------------------------------------
# AFE identities in the Eisenstein analogue


def _check_distinct(shifts: Sequence[float]) -> None:
    ordered = sorted(shifts)
    if any(b - a < 1e-9 for a, b in zip(ordered, ordered[1:])):
        raise DomainError(f"coincident shifts {ordered} give higher-order poles")


def polar_terms(shifts: Sequence[float], X: float) -> mpmath.mpc:
    """Sum of residues of Lambda(1/2 + u) e^(u^2) X^u / u at the poles of prod Z(s + i theta).

    Z = Gamma_R zeta has residue 1 at w = 1 and -1 at w = 0.
    """
    _check_distinct(shifts)
    X = mp.mpf(X)
    total = mp.mpc(0)
    for j, theta in enumerate(shifts):
        others = [o for i, o in enumerate(shifts) if i != j]
        for w0, sign in ((1, 1), (0, -1)):
            u = mp.mpc(w0 - 0.5, -theta)
            rest = mp.fprod(completed_zeta_mp(mp.mpc(w0, o - theta)) for o in others)
            total += sign * rest * mp.exp(u * u) * mp.power(X, u) / u
    return total


def _coefficient_sum(
    shifts, coefficients: np.ndarray, scale: float, level: float, n_start: int
) -> tuple[float, int]:
    """sum_n c(n) n^(-1/2) V(n scale), growing n until the kernel is below ``level``."""
    n_max = max(n_start, 16)
    while True:
        if n_max >= coefficients.shape[0]:
            raise DomainError(f"coefficient table too short for n={n_max}")
        ns = np.arange(1, n_max + 1, dtype=np.float64)
        values = kernel_values(shifts, ns * scale)
        if abs(values[-1]) <= level:
            break
        if n_max * 2 >= coefficients.shape[0]:
            logger.warning(
                f"kernel still {values[-1]:.3e} at n={n_max}; coefficient table exhausted"
            )
            break
        n_max *= 2
    terms = coefficients[1 : n_max + 1] * values / np.sqrt(ns)
    return math.fsum(terms.tolist()), n_max


def _identity_report(
    check_id: str,
    shifts: Sequence[float],
    coefficients_for: Callable[[int], np.ndarray],
    X: float,
    n_start: int,
    tolerance: float,
    inputs: dict,
    level: float = 1e-14,
) -> VerificationReport:
    _check_distinct(shifts)
    with mp.workprec(settings.default_precision_bits):
        lhs = mp.fprod(zeta_mp(mp.mpc(0.5, theta)) for theta in shifts)
        base = mp.exp(ln_gamma_factor_mp(shifts, 0.5))
        polar = polar_terms(shifts, X) / base
    coefficients = coefficients_for(4 * n_start + 1)
    plus, n_plus = _coefficient_sum(shifts, coefficients, X, level, n_start)
    minus, n_minus = _coefficient_sum(shifts, coefficients, 1 / X, level, n_start)
    assert abs(polar.imag) <= 1e-20 * max(1, abs(polar)), "polar terms not real"
    assert abs(lhs.imag) <= 1e-20 * max(1, abs(lhs)), "central value not real"
    rhs = plus + minus - float(polar.real)
    residual = abs(float(lhs.real) - rhs)
    logger.info(f"{check_id}: lhs={float(lhs.real):.12g} rhs={rhs:.12g} terms={n_plus}/{n_minus}")
    return VerificationReport.build(
        check_id=check_id,
        module=MODULE,
        inputs=inputs,
        lhs=lhs.real,
        rhs=rhs,
        residual=residual,
        budget=tolerance,
        provenance=Provenance.DERIVED,
        notes=f"polar={mpmath.nstr(polar.real, 12)}; terms {n_plus}+{n_minus}",
    )


def afe_zeta_identity(t: float, beta: float, tolerance: float = 1e-8) -> VerificationReport:
    """|zeta(1/2+it)|^2 against its two-sided AFE with X = t^beta.

    The AFE side is sum_+- sum_n lambda(n,t) n^(-1/2) V1+-(n,t) minus the polar terms.
    """
    if not 2 <= t <= 100:
        raise DomainError(f"afe_zeta_identity needs 2 <= t <= 100, got {t}")
    spec = AfeKernelSpec(kind="V1plus", t=t, T=t, beta=beta)
    n_start = int(kernel_decay_threshold(spec.model_copy(update={"kind": "V1minus"}), 1e-14)) + 1
    return _identity_report(
        check_id="afe_zeta",
        shifts=spec.gamma_factor.shifts,
        coefficients_for=lambda n: lambda_div_table(t, n),
        X=spec.scale,
        n_start=n_start,
        tolerance=tolerance,
        inputs={"t": t, "beta": beta},
    )


def sym2_twisted_coefficients(t: float, T: float, n_max: int) -> np.ndarray:
    """c(n) = sum_{ab=n} A(a) A(b) (b/a)^(it) for A the sym^2 coefficients of E_T."""
    table = eisenstein_sym2_coefficients(T, n_max)
    A = np.concatenate(([0.0], np.asarray(table.A1)))
    n = np.arange(n_max + 1, dtype=np.float64)
    n[0] = 1.0
    phase = np.exp(1j * t * np.log(n))
    u = A / phase
    v = A * phase
    c = np.zeros(n_max + 1, dtype=np.complex128)
    for a in range(1, n_max + 1):
        m = n_max // a
        c[a : a * m + 1 : a] += u[a] * v[1 : m + 1]
    scale = max(1.0, float(np.max(np.abs(c.real))))
    assert np.max(np.abs(c.imag)) <= 1e-9 * scale, "twisted coefficients not real"
    return c.real


def afe_sym2_identity(t: float, T: float, tolerance: float = 1e-3) -> VerificationReport:
    """|L(1/2 + it, sym^2 E_T)|^2 as a degree-six AFE with X = 1 and polar terms."""
    spec = AfeKernelSpec(kind="V2", t=t, T=T)
    n_start = int(kernel_decay_threshold(spec, 1e-12)) + 1
    return _identity_report(
        check_id="afe_sym2",
        shifts=spec.gamma_factor.shifts,
        coefficients_for=lambda n: sym2_twisted_coefficients(t, T, n),
        X=1.0,
        n_start=n_start,
        tolerance=tolerance,
        inputs={"t": t, "T": T},
        level=1e-12,
    )
