"""GL(3) Voronoi summation kernels, the Psi+- transform and the c = 1 identity.

For a self-dual GL(3) form with archimedean parameters (2iT, 0, -2iT)

    G+-(s) = Q(s, 0) -+ i Q(s, 1),
    Q(s, a) = prod_mu Gamma_R(a + s + mu) / Gamma_R(1 + a - s - mu).

Pointwise values go through mpmath and the gamma module. Contour sums over
tens of thousands of nodes use the complex128 log-gamma of the same module;
their results carry about 1e-13 relative accuracy.
"""

import math
from dataclasses import dataclass
from functools import lru_cache
from typing import Callable, Literal, Optional, Sequence

import mpmath
import numpy as np
import sympy
from mpmath import mp

from config.settings import settings
from maasslab.core.bessel import LogBumpH
from maasslab.core.gamma import gamma_R_mp, ln_gamma_R_array
from maasslab.core.lfun import afe_kernel_leading, zeta_mp
from maasslab.core.quadrature import gl_panel_nodes, integrate
from maasslab.core.weights import weight_W
from maasslab.errors import DomainError, InsufficientDataError
from maasslab.models import (
    CoefficientTable,
    ComplexAP,
    Provenance,
    PsiPmSpec,
    VerificationReport,
    VoronoiKernelPoint,
    WeightParams,
)
from maasslab.utils.logger import get_logger

logger = get_logger(__name__)

MODULE = "voronoi"

EPS = 0.05
KERNEL_CONSTANT = 100.0
STIRLING_CONSTANT = 100.0
PSI_CONSTANT = 100.0
SMOKE_TOLERANCE = 1e-2
TRUNCATION_TOLERANCE = 1e-6
SMOKE_M_LIMIT = 50.0
MELLIN_DECAY_FACTOR = 1e3

GL_NODES = 16
CONTOUR_PANEL = 0.5
POLE_PANEL = 0.05
X_PANELS = 192
DECAY_LEVEL = 1e-11
IM_CUT_START = 16.0
IM_CUT_LIMIT = 4096.0
ROW_CHUNK = 2048
Z_SMOOTHING_DEGREE = 8

# U(xi, x) = b(xi) b(x) on (1, 2)^2 and the default psi of the Mellin audits
DEFAULT_BUMP = LogBumpH(math.sqrt(2.0), math.log(2.0) / 2)
# psi of the c = 1 identity: wide in log scale so the dual sum is short
SMOKE_BUMP = LogBumpH(1.0, 1.0)


# ---------------------------------------------------------------------------
# Gamma quotients


def _shifts(T) -> tuple:
    return (mp.mpc(0, 2 * T), mp.mpc(0), mp.mpc(0, -2 * T))


def _inv_gamma_R(w) -> mpmath.mpc:
    return mp.power(mp.pi, w / 2) * mp.rgamma(w / 2)


def gamma_quotient_mp(s, T: float, a: int = 0) -> mpmath.mpc:
    """Q(s, a) at the ambient precision.

    Raises:
        PoleError: s sits on a pole of a numerator Gamma_R
    """
    s = mp.mpc(s)
    value = mp.mpc(1)
    for mu in _shifts(mp.mpf(T)):
        value *= gamma_R_mp(a + s + mu) * _inv_gamma_R(1 + a - s - mu)
    return value


def gamma_quotient_array(s: np.ndarray, T: float, a: int = 0) -> np.ndarray:
    """Q(s, a) on a complex128 grid; the grid must avoid the numerator poles."""
    s = np.asarray(s, dtype=np.complex128)
    total = np.zeros_like(s)
    for mu in (2j * T, 0j, -2j * T):
        total += ln_gamma_R_array(a + s + mu) - ln_gamma_R_array(1 + a - s - mu)
    return np.exp(total)


def voronoi_kernel(
    s, T: float, precision_bits: Optional[int] = None
) -> tuple[ComplexAP, ComplexAP]:
    """(G+(s), G-(s)).

    Raises:
        PoleError: s is a pole of either quotient
    """
    bits = precision_bits or settings.default_precision_bits
    with mp.workprec(bits):
        s = s.value if isinstance(s, ComplexAP) else mp.mpc(s)
        first = gamma_quotient_mp(s, T, 0)
        second = gamma_quotient_mp(s, T, 1)
        return ComplexAP(first - 1j * second, bits), ComplexAP(first + 1j * second, bits)


def kernel_point(s, T: float, precision_bits: Optional[int] = None) -> VoronoiKernelPoint:
    bits = precision_bits or settings.default_precision_bits
    plus, minus = voronoi_kernel(s, T, bits)
    return VoronoiKernelPoint(s=ComplexAP.of(s, bits), T=T, plus_value=plus, minus_value=minus)


def voronoi_kernel_array(s: np.ndarray, T: float, sign: Literal["+", "-"]) -> np.ndarray:
    first = gamma_quotient_array(s, T, 0)
    second = gamma_quotient_array(s, T, 1)
    return first - 1j * second if sign == "+" else first + 1j * second


def _edge_grid(T: float, sigma: float, points: int) -> list:
    height = T**EPS
    return [mp.mpc(sigma, g) for g in np.linspace(-height, height, points)]


def kernel_bound_audit(
    T: float, constant: float = KERNEL_CONSTANT, points: int = 41
) -> VerificationReport:
    """max |G+-| on Re s = eps, |Im s| <= T^eps against C T^(-1 + 2 eps).

    Near s = eps the quotient behaves like (T/pi)^(2 eps - 1) Gamma_R(eps)/Gamma_R(1 - eps),
    about 99 T^(-0.9), so the budget carries the T^(2 eps) from the abscissa.
    ``regime_ok`` records whether the flat C T^(-1 + eps) also holds; it
    misses by T^eps whenever C is near the peak constant.
    """
    with mp.workprec(settings.default_precision_bits):
        peak = mp.zero
        for s in _edge_grid(T, EPS, points):
            plus, minus = voronoi_kernel(s, T)
            peak = max(peak, abs(plus.value), abs(minus.value))
        bound = constant * mp.mpf(T) ** (-1 + 2 * EPS)
        flat = constant * mp.mpf(T) ** (-1 + EPS)
        flat_ok = peak <= flat
    return VerificationReport.build(
        check_id="voronoi.kernel_bound",
        module=MODULE,
        inputs={"T": T, "sigma": EPS, "points": points, "constant": constant},
        lhs=peak,
        rhs=bound,
        residual=peak,
        budget=bound,
        provenance=Provenance.DERIVED,
        regime_ok=bool(flat_ok),
        notes=f"peak / (C T^(-1+eps)) = {mpmath.nstr(peak / flat, 4)}",
    )


def conjugate_symmetry_defect(s, T: float, precision_bits: Optional[int] = None) -> float:
    """max |G+-(conj s) - conj G-+(s)|, relative to |G|.

    Each quotient is real on the real axis, so conjugation swaps the two signs.
    """
    bits = precision_bits or settings.default_precision_bits
    with mp.workprec(bits):
        s = mp.mpc(s)
        plus, minus = voronoi_kernel(s, T, bits)
        plus_c, minus_c = voronoi_kernel(mp.conj(s), T, bits)
        scale = max(abs(plus.value), abs(minus.value))
        defect = max(
            abs(plus_c.value - mp.conj(minus.value)), abs(minus_c.value - mp.conj(plus.value))
        )
        return float(defect / scale)


def stirling_form_residual(s, T: float, precision_bits: Optional[int] = None) -> float:
    """Relative error of the leading large-T forms of both quotients.

    Q(s, 0) ~ (T/pi)^(2s - 1) Gamma_R(s)/Gamma_R(1 - s) and
    Q(s, 1) ~ (T/pi)^(2s - 1) Gamma_R(1 + s)/Gamma_R(2 - s); the shifts +-2iT
    contribute T^(2 sigma - 1) whatever a is.
    """
    bits = precision_bits or settings.default_precision_bits
    with mp.workprec(bits):
        s = mp.mpc(s)
        scale = mp.mpf(T) / mp.pi
        worst = mp.zero
        for a in (0, 1):
            exact = gamma_quotient_mp(s, T, a)
            leading = scale ** (2 * s - 1) * gamma_R_mp(a + s) * _inv_gamma_R(1 + a - s)
            worst = max(worst, abs(exact / leading - 1))
        return float(worst)


def stirling_form_audit(
    T: float, constant: float = STIRLING_CONSTANT, points: int = 21
) -> VerificationReport:
    """Largest Stirling-form residual on Re s = eps, |Im s| <= T^eps against C/T."""
    worst = max(stirling_form_residual(s, T) for s in _edge_grid(T, EPS, points))
    return VerificationReport.build(
        check_id="voronoi.stirling_form",
        module=MODULE,
        inputs={"T": T, "sigma": EPS, "points": points, "constant": constant},
        lhs=worst,
        rhs=constant / T,
        residual=worst,
        budget=constant / T,
        provenance=Provenance.PAPER,
        notes="leading term only; the correction polynomials are not modelled",
    )


# ---------------------------------------------------------------------------
# Mellin transforms


def mellin(
    psi: Callable,
    s,
    support: Optional[tuple[float, float]] = None,
    precision_bits: Optional[int] = None,
    budget: Optional[float] = None,
) -> ComplexAP:
    """int_0^oo psi(x) x^(s-1) dx over the support of psi.

    ``support`` defaults to ``psi.support``; it must be bounded away from 0.

    Raises:
        DomainError: the support touches 0
        QuadratureBudgetError: the integral misses ``budget``
    """
    lo, hi = support if support is not None else psi.support
    if lo <= 0 or hi <= lo:
        raise DomainError(f"Mellin transforms need a support inside (0, oo), got ({lo}, {hi})")
    bits = precision_bits or settings.default_precision_bits
    with mp.workprec(bits):
        s = s.value if isinstance(s, ComplexAP) else mp.mpc(s)
        span = math.log(hi / lo)
        panels = max(4, int(abs(float(s.imag)) * span / 4) + 4)
        points = [mp.mpf(lo) * (mp.mpf(hi) / lo) ** (mp.mpf(k) / panels) for k in range(panels + 1)]
        result = integrate(
            lambda x: psi(x) * mp.power(x, s - 1), points, budget=budget, what="Mellin transform"
        )
        return ComplexAP(mp.mpc(result.value), bits)


_U, _LC, _HW, _A = sympy.symbols("u lc hw a", real=True)


@lru_cache(maxsize=None)
def _log_profile_derivative(order: int):
    """d^k/du^k of b((u - lc)/hw) e^(a u), the bump pulled back to u = ln x."""
    v = (_U - _LC) / _HW
    expr = sympy.exp(1 - 1 / (1 - v**2)) * sympy.exp(_A * _U)
    return sympy.lambdify((_U, _LC, _HW, _A), sympy.diff(expr, _U, order), modules="mpmath")


def mellin_parts_constant(psi: LogBumpH, sigma: float, order: int) -> float:
    """|| d^N/du^N psi(e^u) e^((1 - sigma) u) ||_1, so |psi~(1 - sigma - i g)| <= C_N / |g|^N."""
    derivative = _log_profile_derivative(order)
    center = math.log(psi.center)
    with mp.workprec(settings.default_precision_bits):
        lc, hw, a = mp.mpf(center), mp.mpf(psi.half_width), mp.mpf(1 - sigma)
        points = [center + psi.half_width * (k / 8 - 1) for k in range(17)]
        result = integrate(lambda u: abs(derivative(u, lc, hw, a)), points, what="parts constant")
        return float(result.value)


def mellin_decay_audit(
    psi: LogBumpH = DEFAULT_BUMP,
    gamma_im: float = 10.0,
    sigma: float = EPS,
    order: int = 3,
    T: float = 100.0,
) -> VerificationReport:
    """|psi~(1 - s)| at s = sigma + i gamma against the integration-by-parts bound.

    The bound C_N min(1, |gamma|^-N) is exact for every smooth psi; the drop
    from s = sigma is recorded, with ``regime_ok`` saying whether it reaches
    MELLIN_DECAY_FACTOR. C_N is reported relative to (T^eps)^N.
    """
    with mp.workprec(settings.default_precision_bits):
        at_zero = abs(mellin(psi, 1 - sigma).value)
        value = abs(mellin(psi, mp.mpc(1 - sigma, -gamma_im)).value)
        constant = mellin_parts_constant(psi, sigma, order)
        bound = min(mellin_parts_constant(psi, sigma, 0), constant / abs(gamma_im) ** order)
        drop = at_zero / value if value else mp.inf
    return VerificationReport.build(
        check_id="voronoi.mellin_decay",
        module=MODULE,
        inputs={
            "sigma": sigma,
            "gamma": gamma_im,
            "order": order,
            "center": psi.center,
            "half_width": psi.half_width,
        },
        lhs=value,
        rhs=bound,
        residual=value,
        budget=bound,
        provenance=Provenance.DERIVED,
        regime_ok=bool(drop >= MELLIN_DECAY_FACTOR),
        notes=(
            f"decay factor {mpmath.nstr(drop, 4)} from s = sigma; "
            f"C_N / (T^eps)^N = {constant / (T**EPS) ** order:.4g}"
        ),
    )


# ---------------------------------------------------------------------------
# Truncation


def voronoi_truncation(c: int, r: int, l: int, M: float, T: float, eps: float = EPS) -> int:
    """Largest k with k < c^3 r^3 T^(2 + eps) / (M l^2); 0 when no k qualifies.

    Terms beyond the cutoff fall below T^-100 once T is large; a return value
    of 0 means the whole dual sum is negligible.
    """
    if min(c, r, l) < 1 or M <= 0 or T <= 1:
        raise DomainError(f"truncation needs positive c, r, l, M and T > 1, got {(c, r, l, M, T)}")
    bound = c**3 * r**3 * T ** (2 + eps) / (M * l**2)
    k_cut = math.ceil(bound) - 1
    if k_cut < 1:
        logger.debug(f"dual sum negligible: k-bound {bound:.3g} < 1 at c={c}, r={r}, l={l}")
        return 0
    return k_cut


# ---------------------------------------------------------------------------
# Psi+-


def _bump_np(x: np.ndarray, psi: LogBumpH) -> np.ndarray:
    """LogBumpH values on a numpy grid."""
    v = (np.log(np.abs(x)) - math.log(psi.center)) / psi.half_width
    out = np.zeros_like(v)
    inside = np.abs(v) < 1
    out[inside] = np.exp(1 - 1 / (1 - v[inside] ** 2))
    return out


def _window_np(tau: np.ndarray, p: WeightParams) -> np.ndarray:
    """Z(tau) = W(T tau) for 0 < tau < 2 and 0 otherwise; W as in the weights module."""
    T, alpha, degree = p.T, p.alpha, p.smoothing_degree
    t = T * np.asarray(tau, dtype=np.float64)
    first = -np.expm1(-((t / (2 * T) ** (1 - alpha / 2)) ** degree))
    second = -np.expm1(-(((4 * T**2 - t**2) / (4 * T ** (2 - alpha / 2))) ** degree))
    return np.where((t > 0) & (t < 2 * T), np.clip(first * second, 0.0, 1.0), 0.0)


_erfc = np.vectorize(math.erfc, otypes=[np.float64])


def _afe_np(y: np.ndarray) -> np.ndarray:
    """erfc(ln y / 2)/2, the leading AFE kernel of the lfun module."""
    return 0.5 * _erfc(np.log(y) / 2)


def psi_kernel(
    x: np.ndarray, y: float, w: float, N: float, M: float, T: float, alpha: float
) -> np.ndarray:
    """psi(x, y; w) = int U(xi, x) Z(tau) V(xi N/T, x M/T^3, tau) e(-xi y^2 w) d xi.

    tau = 2 pi y sqrt(xi x); V is the product of the leading degree-2 and
    degree-3 AFE kernels at t = T tau. y is not range checked: outside the
    window Z vanishes and so does psi.
    """
    panels = int(math.ceil(y**2 * abs(w))) + 4
    xi, weights = gl_panel_nodes(np.linspace(1.0, 2.0, panels + 1), GL_NODES)
    XI, X = np.meshgrid(xi, np.asarray(x, dtype=np.float64))
    tau = 2 * np.pi * y * np.sqrt(XI * X)
    Z = _window_np(tau, WeightParams(T=T, alpha=alpha, smoothing_degree=Z_SMOOTHING_DEGREE))
    U = _bump_np(XI, DEFAULT_BUMP) * _bump_np(X, DEFAULT_BUMP)
    with np.errstate(divide="ignore"):
        V = _afe_np(XI * N / T / tau) * _afe_np(X * M / T**3 / tau**3)
    V = np.where(Z > 0, V, 0.0)
    phase = np.exp(-2j * np.pi * XI * y**2 * w)
    return (U * Z * V * phase) @ weights


def psi_profile(spec: PsiPmSpec, x: np.ndarray) -> np.ndarray:
    """psi(x, y; u/z) at the arguments carried by ``spec``."""
    return psi_kernel(x, spec.y, spec.u / spec.z, spec.N, spec.M, spec.T, spec.alpha)


def _mellin_rows(values: np.ndarray, log_x: np.ndarray, s: np.ndarray) -> np.ndarray:
    """sum_i values_i x_i^(-s) for every s, in row chunks."""
    out = np.empty(s.shape, dtype=np.complex128)
    for start in range(0, s.size, ROW_CHUNK):
        chunk = s[start : start + ROW_CHUNK]
        out[start : start + ROW_CHUNK] = np.exp(-np.outer(chunk, log_x)) @ values
    return out


def _decay_cut(transform: Callable[[np.ndarray], np.ndarray], level: float = DECAY_LEVEL) -> float:
    """First doubling of IM_CUT_START with |transform| <= level |transform(0)| on [cut/2, cut]."""
    reference = abs(transform(np.zeros(1))[0])
    cut = IM_CUT_START
    while cut < IM_CUT_LIMIT:
        band = np.linspace(cut / 2, cut, 257)
        if np.max(np.abs(transform(band))) <= level * reference:
            return cut
        cut *= 2
    logger.warning(f"Mellin transform above {level:g} of its peak at |Im s| = {IM_CUT_LIMIT:g}")
    return IM_CUT_LIMIT


def _contour_nodes(lo: float, hi: float, poles: Sequence[float]) -> tuple[np.ndarray, np.ndarray]:
    """Gauss-Legendre nodes on [lo, hi]; panels shrink to POLE_PANEL within 1 of a pole height."""
    breaks = set(np.arange(lo, hi, CONTOUR_PANEL).tolist()) | {hi}
    for p in poles:
        if lo - 1 < p < hi + 1:
            breaks |= {b for b in np.arange(p - 1, p + 1, POLE_PANEL).tolist() if lo < b < hi}
    return gl_panel_nodes(sorted(breaks), GL_NODES)


@dataclass
class PsiValue:
    value: complex
    mass: float
    im_cut: float


def _psi_pm(spec: PsiPmSpec, sigma: float, im_cut: Optional[float]) -> PsiValue:
    x, wx = gl_panel_nodes(np.linspace(1.0, 2.0, X_PANELS + 1), GL_NODES)
    profile = wx * psi_profile(spec, x)
    log_x = np.log(x)

    def transform(gamma: np.ndarray) -> np.ndarray:
        return _mellin_rows(profile, log_x, sigma + 1j * np.asarray(gamma, dtype=np.float64))

    cut = im_cut if im_cut is not None else _decay_cut(transform)
    gamma, weights = _contour_nodes(-cut, cut, (0.0, 2 * spec.T, -2 * spec.T))
    s = sigma + 1j * gamma
    scale = np.exp(-s * (math.log(spec.z) + 2 * math.log(spec.T)))
    integrand = weights * scale * voronoi_kernel_array(s, spec.T, spec.sign) * transform(gamma)
    value = complex(integrand.sum() / (4 * math.pi))
    return PsiValue(value=value, mass=float(np.abs(integrand).sum() / (4 * math.pi)), im_cut=cut)


def psi_pm(spec: PsiPmSpec, sigma: float = EPS, im_cut: Optional[float] = None) -> ComplexAP:
    """Psi+-(y, z; u) = (1/4 pi i) int_(sigma) z^-s T^-2s G+-(s) int psi(x, y; u/z) x^-s dx ds.

    With ``im_cut`` unset the contour runs until the x-Mellin transform has
    decayed below DECAY_LEVEL of its value on the real axis; pass
    ``im_cut=T**0.05`` for the short contour of the large-T argument.
    """
    if sigma <= 0:
        raise DomainError(f"the Psi contour must lie right of Re s = 0, got sigma={sigma}")
    result = _psi_pm(spec, sigma, im_cut)
    logger.debug(
        f"Psi{spec.sign}(y={spec.y:g}, z={spec.z:g}; u={spec.u:g}) = {result.value:.6e}, "
        f"cut {result.im_cut:g}"
    )
    return ComplexAP.of(result.value, 64)


def _psi_inputs(spec: PsiPmSpec) -> dict:
    return spec.model_dump(include={"y", "z", "u", "sign", "T", "N", "M"})


def psi_bound_report(spec: PsiPmSpec, constant: float = PSI_CONSTANT) -> VerificationReport:
    """|Psi+-| against C T^(-1+eps)."""
    value = abs(psi_pm(spec).value)
    bound = constant * spec.T ** (-1 + EPS)
    return VerificationReport.build(
        check_id=f"voronoi.psi_bound.{'plus' if spec.sign == '+' else 'minus'}",
        module=MODULE,
        inputs=_psi_inputs(spec),
        lhs=value,
        rhs=bound,
        residual=value,
        budget=bound,
        provenance=Provenance.PAPER,
    )


def psi_decay_report(
    spec: PsiPmSpec, factor: float = 2.0, constant: float = PSI_CONSTANT
) -> VerificationReport:
    """|Psi+-| at u = factor z T^(2 eps), past the surviving range, against T^-10.

    At desk-scale T the phase y^2 u/z stays small there, so ``regime_ok``
    records whether T^-10 was met and the budget falls back to C T^(-1+eps).
    """
    u = factor * spec.z * spec.T ** (2 * EPS)
    moved = spec.model_copy(update={"u": u})
    value = abs(psi_pm(moved).value)
    at_zero = abs(psi_pm(spec.model_copy(update={"u": 0.0})).value)
    threshold = spec.T**-10
    regime_ok = value <= threshold
    budget = threshold if regime_ok else constant * spec.T ** (-1 + EPS)
    return VerificationReport.build(
        check_id=f"voronoi.psi_decay.{'plus' if spec.sign == '+' else 'minus'}",
        module=MODULE,
        inputs=_psi_inputs(moved),
        lhs=value,
        rhs=threshold,
        residual=value,
        budget=budget,
        provenance=Provenance.PAPER,
        regime_ok=bool(regime_ok),
        notes=f"|Psi(u)|/|Psi(0)| = {mpmath.nstr(value / at_zero, 4) if at_zero else 'n/a'}",
    )


def psi_u_derivative(spec: PsiPmSpec, step: Optional[float] = None) -> complex:
    """Central difference of Psi+- in u with step z/1000 by default."""
    h = step if step is not None else spec.z * 1e-3
    ahead = _psi_pm(spec.model_copy(update={"u": spec.u + h}), EPS, None)
    behind = _psi_pm(spec.model_copy(update={"u": spec.u - h}), EPS, ahead.im_cut)
    return (ahead.value - behind.value) / (2 * h)


def psi_u_scaling_report(spec: PsiPmSpec, constant: float = PSI_CONSTANT) -> VerificationReport:
    """z |dPsi/du| at (z, u) and (2z, 2u) against C T^(-1+eps); the ratio shows the z^-1 scaling."""
    doubled = spec.model_copy(update={"z": 2 * spec.z, "u": 2 * spec.u})
    d1 = abs(psi_u_derivative(spec))
    d2 = abs(psi_u_derivative(doubled))
    worst = max(spec.z * d1, doubled.z * d2)
    bound = constant * spec.T ** (-1 + EPS)
    return VerificationReport.build(
        check_id=f"voronoi.psi_u_scaling.{'plus' if spec.sign == '+' else 'minus'}",
        module=MODULE,
        inputs=_psi_inputs(spec),
        lhs=worst,
        rhs=bound,
        residual=worst,
        budget=bound,
        provenance=Provenance.PAPER,
        notes=f"|dPsi/du| ratio z:2z = {d1 / d2:.4g}" if d2 else "",
    )


def contour_shift_report(spec: PsiPmSpec, relative: float = 1e-8) -> VerificationReport:
    """Psi+- on Re s = eps and Re s = 2 eps; no pole lies between them."""
    first = _psi_pm(spec, EPS, None)
    second = _psi_pm(spec, 2 * EPS, None)
    defect = abs(first.value - second.value)
    tolerance = relative * max(first.mass, second.mass)
    return VerificationReport.build(
        check_id=f"voronoi.contour_shift.{'plus' if spec.sign == '+' else 'minus'}",
        module=MODULE,
        inputs=_psi_inputs(spec),
        lhs=first.value,
        rhs=second.value,
        residual=defect,
        budget=tolerance,
        provenance=Provenance.TRIVIAL,
    )


# ---------------------------------------------------------------------------
# The c = 1 identity


@dataclass
class DualKernel:
    """I_a(X) = (1/2 pi i) int_(1/2) X^(1-s) Q(s, a) psi~(1 - s) ds, held as contour data."""

    gamma: np.ndarray
    even: np.ndarray
    odd: np.ndarray
    im_cut: float

    def values(self, X: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
        """(I_0(X), I_1(X)); both are real and G+- = Q0 -+ i Q1 gives I+- = I_0 -+ i I_1."""
        X = np.asarray(X, dtype=np.float64)
        log_X = np.log(X)
        first = np.empty(X.shape)
        second = np.empty(X.shape)
        for start in range(0, X.size, ROW_CHUNK):
            phases = np.exp(-1j * np.outer(log_X[start : start + ROW_CHUNK], self.gamma))
            root = np.sqrt(X[start : start + ROW_CHUNK]) / math.pi
            first[start : start + ROW_CHUNK] = root * (phases @ self.even).real
            second[start : start + ROW_CHUNK] = root * (phases @ self.odd).real
        return first, second


def dual_kernel(psi: LogBumpH, T_f: float) -> DualKernel:
    """Contour data on Re s = 1/2, folded onto Im s >= 0 by conjugation; there |Q(s, a)| = 1."""
    lo, hi = psi.support
    u_lo, u_hi = math.log(lo), math.log(hi)

    def transform_on(panels: int) -> Callable[[np.ndarray], np.ndarray]:
        u, wu = gl_panel_nodes(np.linspace(u_lo, u_hi, panels + 1), GL_NODES)
        profile = wu * _bump_np(np.exp(u), psi) * np.exp(u / 2)

        def transform(gamma: np.ndarray) -> np.ndarray:
            return _mellin_rows(profile, -u, 0.0 + 1j * np.asarray(gamma, dtype=np.float64))

        return transform

    cut = _decay_cut(transform_on(X_PANELS))
    panels = max(X_PANELS, int(math.ceil(cut * (u_hi - u_lo) / (2 * math.pi) / 2)) + 8)
    gamma, weights = _contour_nodes(0.0, cut, (2 * T_f,))
    # psi~(1/2 - i g) = int psi(e^u) e^(u/2) e^(-i g u) du
    mellin_values = transform_on(panels)(-gamma)
    s = 0.5 + 1j * gamma
    even = weights * gamma_quotient_array(s, T_f, 0) * mellin_values
    odd = weights * gamma_quotient_array(s, T_f, 1) * mellin_values
    return DualKernel(gamma=gamma, even=even, odd=odd, im_cut=cut)


def polar_terms(psi: LogBumpH, t: float, M: float) -> float:
    """Residues of zeta(s + 2it) zeta(s) zeta(s - 2it) psi~(s) M^s at s = 1 and 1 +- 2it."""
    if t == 0:
        raise DomainError("the Eisenstein lift at t = 0 has a triple pole")
    with mp.workprec(settings.default_precision_bits):
        t = mp.mpf(t)
        at_one = abs(zeta_mp(mp.mpc(1, 2 * t))) ** 2 * mellin(psi, 1).value.real * M
        shifted = (
            zeta_mp(mp.mpc(1, 2 * t))
            * zeta_mp(mp.mpc(1, 4 * t))
            * mellin(psi, mp.mpc(1, 2 * t)).value
        )
        return float(at_one + 2 * (shifted * mp.power(M, mp.mpc(1, 2 * t))).real)


@dataclass
class DualSum:
    """Partial sums of sum_k A(k, 1)/k I_a(k M) for both quotients."""

    even: np.ndarray
    odd: np.ndarray
    terms: np.ndarray

    def at(self, k: int) -> float:
        return float(self.even[k - 1]) if k >= 1 else 0.0


def dual_sum(
    table: CoefficientTable, psi: LogBumpH, T_f: float, M: float, k_max: Optional[int] = None
) -> DualSum:
    k_max = table.n_max if k_max is None else min(k_max, table.n_max)
    kernel = dual_kernel(psi, T_f)
    k = np.arange(1, k_max + 1, dtype=np.float64)
    coefficients = np.array(table.A1[:k_max]) / k
    first, second = kernel.values(k * M)
    terms = coefficients * first
    return DualSum(even=np.cumsum(terms), odd=np.cumsum(coefficients * second), terms=terms)


def _lhs(table: CoefficientTable, psi: LogBumpH, M: float) -> float:
    lo, hi = psi.support
    m_hi = math.floor(hi * M)
    if m_hi > table.n_max:
        raise InsufficientDataError(
            f"{table} for m < {hi:.3g} M", needed=m_hi, available=table.n_max
        )
    m_lo = max(1, math.ceil(lo * M))
    with mp.workprec(settings.default_precision_bits):
        return float(mp.fsum(table[m] * psi(mp.mpf(m) / M) for m in range(m_lo, m_hi + 1)))


def _check_smoke_inputs(table: CoefficientTable, T_f: float, M: float) -> None:
    if M <= 0:
        raise DomainError(f"M must be positive, got {M}")
    if M > SMOKE_M_LIMIT:
        logger.warning(f"M={M:g} above {SMOKE_M_LIMIT:g}: the dual sum needs far more coefficients")
    if table.eisenstein_t is not None and abs(table.eisenstein_t - T_f) > 1e-12:
        raise DomainError(f"table is the Eisenstein lift at t={table.eisenstein_t}, not T_f={T_f}")


def voronoi_identity_smoke(
    table: CoefficientTable,
    T_f: float,
    M: float,
    psi: LogBumpH = SMOKE_BUMP,
    tolerance: float = SMOKE_TOLERANCE,
) -> VerificationReport:
    """sum_m A(m, 1) psi(m/M) against its Voronoi dual at c = r = 1, b = 0.

    The dual side is (1/2) sum_+- sum_k A(k, 1)/k I+-(kM), summed to the end
    of the table; Eisenstein lifts add the residues at s = 1, 1 +- 2it.

    Raises:
        InsufficientDataError: the table is too short for the left side
        DomainError: M <= 0 or a mismatched Eisenstein lift
    """
    _check_smoke_inputs(table, T_f, M)
    lhs = _lhs(table, psi, M)
    polar = polar_terms(psi, T_f, M) if table.eisenstein_t is not None else 0.0
    dual = dual_sum(table, psi, T_f, M)
    rhs = polar + float(dual.even[-1])
    residual = abs(lhs - rhs)
    logger.info(f"Voronoi c=1 at M={M:g}: lhs {lhs:.10g}, rhs {rhs:.10g}, residual {residual:.3e}")
    return VerificationReport.build(
        check_id="voronoi.identity.c1",
        module=MODULE,
        inputs={"table": table.source_form_id, "T_f": T_f, "M": M, "k_max": table.n_max},
        lhs=lhs,
        rhs=rhs,
        residual=residual,
        budget=tolerance,
        provenance=Provenance.DERIVED,
        notes=(
            f"polar {polar:.6g}; odd-quotient dual sum {float(dual.odd[-1]):.3e} "
            "cancels between the signs"
        ),
    )


def voronoi_truncation_audit(
    table: CoefficientTable,
    T_f: float,
    M: float,
    psi: LogBumpH = SMOKE_BUMP,
    k_full: int = 10_000,
    tolerance: float = TRUNCATION_TOLERANCE,
) -> VerificationReport:
    """The dual sum cut at voronoi_truncation(1, 1, 1, M, T_f) against the sum to ``k_full``.

    The budget is ``tolerance`` whatever happens past the cutoff. ``regime_ok``
    records whether the discarded terms carry less than ``tolerance`` in
    absolute mass, which the T^-100 tail only guarantees once T is large.
    """
    _check_smoke_inputs(table, T_f, M)
    k_cut = voronoi_truncation(1, 1, 1, M, T_f)
    dual = dual_sum(table, psi, T_f, M, k_full)
    k_end = len(dual.even)
    truncated = dual.at(min(k_cut, k_end))
    full = float(dual.even[-1])
    difference = abs(full - truncated)
    discarded = float(np.abs(dual.terms[k_cut:]).sum())
    regime_ok = discarded <= tolerance
    return VerificationReport.build(
        check_id="voronoi.truncation",
        module=MODULE,
        inputs={"table": table.source_form_id, "T_f": T_f, "M": M, "k_cut": k_cut, "k_full": k_end},
        lhs=truncated,
        rhs=full,
        residual=difference,
        budget=tolerance,
        provenance=Provenance.DERIVED,
        regime_ok=bool(regime_ok),
        notes=f"discarded terms carry absolute mass {discarded:.3e}",
    )


def kernel_weight_check(T: float, alpha: float, tau: Sequence[float]) -> float:
    """max |Z(tau) - W(T tau)| between the vectorised window and the weights module."""
    p = WeightParams(T=T, alpha=alpha, smoothing_degree=Z_SMOOTHING_DEGREE)
    ours = _window_np(np.asarray(tau, dtype=np.float64), p)
    return max(abs(float(a) - weight_W(T * t, p)) for a, t in zip(ours, tau))


def afe_profile_check(ys: Sequence[float]) -> float:
    """max |vectorised V factor - afe_kernel_leading| on ``ys``."""
    ours = _afe_np(np.asarray(ys, dtype=np.float64))
    return max(abs(float(a) - afe_kernel_leading(y)) for a, y in zip(ours, ys))
