"""Level-one Kuznetsov formula, evaluated from both sides.

The spectral side

    sum_j lambda_j(+-n) lambda_j(m) / L(1, sym^2 u_j) h(t_j)
        + int lambda(n, t) lambda(m, -t) / |zeta(1 + 2it)|^2 h(t) dt / 2 pi

is compared with the geometric side

    delta_{+-n, m} int h(t) d*t / 2 pi^2
        + sum_c S(+-n, m, c) / c int J^+-(sqrt(nm)/c, t) h(t) d*t / 2 pi,

d*t = tanh(pi t) t dt. Every discarded piece (forms above the spectrum
window, the c-sum beyond c_max, quadrature) carries an explicit bound so that
the residual is judged against a truncation budget and never against a
tolerance.

The second half of the module runs the formula in the other direction: a sum
of Kloosterman sums against a bump Phi expanded over the spectrum with the
dot/hat/check transforms.
"""

import json
import math
from dataclasses import dataclass, field
from functools import lru_cache
from pathlib import Path
from typing import Callable, Literal, Optional, Sequence

import mpmath
import numpy as np
import sympy
from mpmath import mp

from config.settings import settings
from maasslab.core.arith import kloosterman
from maasslab.core.bessel import LogBumpH, bessel_J_mp, bessel_K_mp
from maasslab.core.lfun import zeta_mp
from maasslab.core.quadrature import gl_panel_nodes, integrate, uniform_panels
from maasslab.core.spectra import l1_sym2, require_level_one
from maasslab.errors import (
    DomainError,
    IncompleteSpectrumError,
    InsufficientDataError,
    UnsupportedLevelError,
)
from maasslab.models import (
    BumpSpec,
    ExpansionLedger,
    GaussianPolyTerm,
    KloostermanQuery,
    MaassFormRecord,
    Provenance,
    SpectrumFile,
    TraceLedger,
    TraceQuery,
    VerificationReport,
)
from maasslab.utils.logger import get_logger

logger = get_logger(__name__)

MODULE = "kuznetsov"

GL_NODES = 12
GL_CHECK_NODES = 16
T_PANEL = 0.5

# 1/L(1, sym^2 u_j) <= INV_L1_CONSTANT ln(t_j + e)
INV_L1_CONSTANT = 20.0
# 1/|zeta(1 + 2it)| <= INV_ZETA_CONSTANT ln(t + e)
INV_ZETA_CONSTANT = 10.0
# dN(t) <= (t/6 + WEYL_SLACK) dt for the level-one counting function
WEYL_SLACK = 2.0
RAMANUJAN_EXPONENT = 7 / 64
# d(c) <= DIVISOR_CONSTANT c^(1/3)
DIVISOR_CONSTANT = 4.0

C_START = 16
C_MAX_LIMIT = 4096
C_TAIL_TARGET = 1e-4
# the leading residue may bound the kernel once the next one is this much smaller
TAIL_RATIO_LIMIT = 0.25
TAIL_SAFETY = 2.0


# ---------------------------------------------------------------------------
# Test functions


@dataclass(frozen=True)
class GaussianPolyH:
    """h(t) = sum coef e^(-(t/A)^2) prod_{k<K} (t^2 + (k + 1/2)^2).

    Every term is even and entire; the factor with K pairs vanishes at
    +-i(k + 1/2), k < K, which removes the first poles of the Kuznetsov
    kernels and makes the c-sum converge like c^(-2K - 3/2).
    """

    terms: tuple[GaussianPolyTerm, ...]

    def __post_init__(self):
        if not self.terms:
            raise DomainError("a test function needs at least one term")

    @classmethod
    def from_query(cls, q: TraceQuery) -> "GaussianPolyH":
        return cls(tuple(q.h))

    @property
    def zero_pairs(self) -> int:
        return min(term.K for term in self.terms)

    @staticmethod
    def _term(term: GaussianPolyTerm, t, t2):
        poly = mp.one
        for k in range(term.K):
            poly *= t2 + (k + mp.mpf(1) / 2) ** 2
        return term.coef * mp.exp(-t2 / mp.mpf(term.A) ** 2) * poly

    def __call__(self, t):
        t = mp.mpmathify(t)
        t2 = t * t
        return mp.fsum(self._term(term, t, t2) for term in self.terms)

    def majorant(self, t) -> mpmath.mpf:
        """sum |coef| |term| on the real line."""
        t = mp.mpf(t)
        t2 = t * t
        return mp.fsum(abs(self._term(term, t, t2)) for term in self.terms)

    def cutoff(self) -> float:
        """A point past which (1 + t) times the majorant stays below 2^-prec."""
        threshold = mp.ldexp(1, -mp.prec)
        t = max(term.A * (math.sqrt(term.K) + 1) for term in self.terms)
        while (1 + t) * self.majorant(t) > threshold:
            t += T_PANEL
        return t


def strip_decay_audit(
    h: GaussianPolyH, constant: float = 1e4, points: int = 200
) -> VerificationReport:
    """Evenness and (1 + |z|)^(2 + theta) |h(z)| on the real line and the strip edge.

    theta = 7/64, and the edge is Im z = 1/4 + theta.
    """
    edge = 0.25 + RAMANUJAN_EXPONENT
    power = 2 + RAMANUJAN_EXPONENT
    peak = mp.zero
    parity_defect = mp.zero
    with mp.workprec(settings.default_precision_bits):
        for t in np.linspace(0.0, h.cutoff(), points):
            for z in (mp.mpc(t, 0), mp.mpc(t, edge)):
                value = h(z)
                peak = max(peak, abs(value) * (1 + abs(z)) ** power)
                parity_defect = max(parity_defect, abs(value - h(-z)))
    return VerificationReport.build(
        check_id="kuznetsov.test_function",
        module=MODULE,
        inputs={"terms": len(h.terms), "zero_pairs": h.zero_pairs, "strip": edge},
        lhs=peak,
        rhs=constant,
        residual=peak + parity_defect,
        budget=constant,
        provenance=Provenance.PAPER,
        notes=f"evenness defect {mpmath.nstr(parity_defect, 3)}",
    )


# ---------------------------------------------------------------------------
# t-grids


@dataclass
class _TGrid:
    """Gauss-Legendre nodes on [0, cutoff] with the test function sampled on them."""

    nodes: list
    weights: list
    h: list

    @classmethod
    def build(cls, h: GaussianPolyH, degree: int = GL_NODES) -> "_TGrid":
        t_cut = h.cutoff()
        points = uniform_panels(0.0, t_cut, int(math.ceil(t_cut / T_PANEL)))
        xs, ws = gl_panel_nodes(points, degree)
        nodes = [mp.mpf(float(x)) for x in xs]
        return cls(nodes=nodes, weights=[mp.mpf(float(w)) for w in ws], h=[h(t) for t in nodes])

    def sum(self, f: Callable) -> tuple[mpmath.mpf, mpmath.mpf]:
        """(sum w f, sum |w f|) over the nodes; f gets (t, h(t))."""
        values = [w * f(t, ht) for t, w, ht in zip(self.nodes, self.weights, self.h)]
        return mp.fsum(values), mp.fsum(abs(v) for v in values)


def _weighted(grid: _TGrid):
    return zip(grid.nodes, grid.weights, grid.h)


def _kernel_factors(grid: _TGrid, sign: str) -> list:
    if sign == "+":
        return [w * t * ht / mp.cosh(mp.pi * t) for t, w, ht in _weighted(grid)]
    return [w * t * ht * mp.sinh(mp.pi * t) for t, w, ht in _weighted(grid)]


def _kernel_integral(grid: _TGrid, factors: list, sign: str, y: mpmath.mpf) -> mpmath.mpf:
    """int J^+-(x, t) h(t) d*t / 2 pi with y = 4 pi x.

    Folding t -> -t leaves -(2/pi) int_0^oo Im J_2it(y) t h / cosh(pi t) dt for
    the plus sign and (4/pi^2) int_0^oo K_2it(y) sinh(pi t) t h dt for minus.
    """
    if sign == "+":
        total = mp.fsum(
            f * bessel_J_mp(mp.mpc(0, 2 * t), y).imag for t, f in zip(grid.nodes, factors)
        )
        return -2 / mp.pi * total
    total = mp.fsum(f * bessel_K_mp(t, y) for t, f in zip(grid.nodes, factors))
    return 4 / mp.pi**2 * total


def kernel_transform(h: GaussianPolyH, sign: str, x: float) -> float:
    """int J^+-(x, t) h(t) d*t / 2 pi on the trace grid."""
    with mp.workprec(settings.default_precision_bits):
        grid = _TGrid.build(h)
        factors = _kernel_factors(grid, sign)
        return float(_kernel_integral(grid, factors, sign, 4 * mp.pi * mp.mpf(x)))


def leading_residue(h: GaussianPolyH, sign: str, x: float) -> float:
    """Contribution of the first uncancelled pole -i(K + 1/2) to kernel_transform.

    2 (K + 1/2) (-1)^K h(-i(K + 1/2)) J_{2K+1}(4 pi x) / pi, with I_{2K+1} for
    the minus sign.
    """
    K = h.zero_pairs
    with mp.workprec(settings.default_precision_bits):
        y = 4 * mp.pi * mp.mpf(x)
        bessel = mp.besselj(2 * K + 1, y) if sign == "+" else mp.besseli(2 * K + 1, y)
        pole = h(mp.mpc(0, -(K + mp.mpf(1) / 2))).real
        return float(2 * (K + mp.mpf(1) / 2) * (-1) ** K * pole * bessel / mp.pi)


# ---------------------------------------------------------------------------
# Spectral side


@dataclass
class SpectralSide:
    cusp: float
    eis: float
    tail: float
    quadrature_error: float = 0.0


def _check_query(q: TraceQuery) -> SpectrumFile:
    spectrum = require_level_one(q.spectrum)
    if not spectrum.complete:
        raise IncompleteSpectrumError(
            f"spectrum up to t_max={spectrum.t_max} is not flagged complete; "
            "the trace formula needs every form"
        )
    return spectrum


def _cusp_weight(r: MaassFormRecord) -> tuple[float, float]:
    """1/L(1, sym^2 u_j) and its uncertainty; the partial sum stands in when no value is given."""
    if r.L1_sym2 is not None:
        return 1.0 / float(r.L1_sym2), 0.0
    value, tail = l1_sym2(r, r.n_max)
    if value > tail:
        return 1.0 / value, 1.0 / (value - tail) - 1.0 / value
    bound = INV_L1_CONSTANT * math.log(float(r.t_j) + math.e)
    logger.warning(f"{r}: L(1, sym^2) partial sum {value:.4g} is within its tail {tail:.3g}")
    return 1.0 / value, bound + 1.0 / abs(value)


def _eisenstein_lambda(n: int, m: int, t) -> mpmath.mpf:
    return _lambda_mp(n, t) * _lambda_mp(m, t)


def _lambda_mp(n: int, t) -> mpmath.mpf:
    """lambda(n, t) = sum_{d | n} cos(t ln(d^2/n)) at the ambient precision."""
    return mp.fsum(mp.cos(t * mp.log(mp.mpf(d * d) / n)) for d in _divisors(n))


@lru_cache(maxsize=1024)
def _divisors(n: int) -> tuple[int, ...]:
    return tuple(int(d) for d in sympy.divisors(n))


def spectral_tail_bound(q: TraceQuery) -> float:
    """Weyl density times the h majorant for t_j above the spectrum window.

    Each form is bounded by d(n) d(m) (nm)^(7/64) INV_L1_CONSTANT ln(t + e) |h(t)|.
    """
    h = GaussianPolyH.from_query(q)
    t0 = mp.mpf(float(q.spectrum.t_max))
    amplitude = len(_divisors(q.n)) * len(_divisors(q.m)) * (q.n * q.m) ** RAMANUJAN_EXPONENT

    def density(t):
        return (t / 6 + WEYL_SLACK) * INV_L1_CONSTANT * mp.log(t + mp.e) * h.majorant(t)

    result = integrate(density, [t0, t0 + 1, mp.inf], method="tanh-sinh", what="spectral tail")
    return float(amplitude * (abs(result.value) + result.error))


def spectral_side(q: TraceQuery) -> SpectralSide:
    """Cusp forms of the window, the Eisenstein integral and the Weyl-law tail.

    Raises:
        IncompleteSpectrumError: the spectrum is not flagged complete
        InsufficientDataError: a form lacks lambda_j(n) or lambda_j(m)
    """
    spectrum = _check_query(q)
    h = GaussianPolyH.from_query(q)
    signed_n = q.n if q.sign == "+" else -q.n
    with mp.workprec(settings.default_precision_bits):
        cusp = mp.zero
        uncertainty = 0.0
        for r in spectrum.records:
            if max(q.n, q.m) > r.n_max:
                raise InsufficientDataError(
                    f"eigenvalues of {r}", needed=max(q.n, q.m), available=r.n_max
                )
            weight, weight_error = _cusp_weight(r)
            numerator = r.eigenvalue(signed_n) * r.eigenvalue(q.m) * h(mp.mpf(str(r.t_j)))
            cusp += numerator * weight
            uncertainty += float(abs(numerator)) * weight_error

        def eis_integrand(t, ht):
            return _eisenstein_lambda(q.n, q.m, t) * ht / abs(zeta_mp(mp.mpc(1, 2 * t))) ** 2

        grid = _TGrid.build(h)
        eis, eis_abs = grid.sum(eis_integrand)
        check, _ = _TGrid.build(h, GL_CHECK_NODES).sum(eis_integrand)
        eis /= mp.pi
        quad_error = abs(eis - check / mp.pi) + mp.ldexp(eis_abs, 20 - mp.prec)
        tail = spectral_tail_bound(q) + uncertainty
    logger.debug(
        f"spectral side n={q.n} m={q.m} {q.sign}: cusp {mpmath.nstr(cusp, 12)} over "
        f"{len(spectrum.records)} forms, eis {mpmath.nstr(eis, 12)}, tail {tail:.3e}"
    )
    return SpectralSide(
        cusp=float(cusp), eis=float(eis), tail=tail, quadrature_error=float(quad_error)
    )


# ---------------------------------------------------------------------------
# Geometric side


@dataclass
class GeometricSide:
    delta: float
    kloos: float
    c_tail: float
    c_max: int = 0
    quadrature_error: float = 0.0
    terms: list = field(default_factory=list)


def _residue_values(h: GaussianPolyH) -> tuple[mpmath.mpf, mpmath.mpf]:
    """|h| at the first two uncancelled poles -i(K + 1/2), -i(K + 3/2)."""
    K = h.zero_pairs
    first = abs(h(mp.mpc(0, -(K + mp.mpf(1) / 2))))
    second = abs(h(mp.mpc(0, -(K + mp.mpf(3) / 2))))
    if first == 0:
        raise DomainError("the test function vanishes at its first kernel pole; raise K explicitly")
    return first, second


def tail_threshold(q: TraceQuery) -> int:
    """Smallest c from which the leading residue dominates the kernel integral.

    The next residue and the next power-series term are each smaller by a
    factor (y/2)^2 times a constant; both together stay below TAIL_RATIO_LIMIT.
    """
    h = GaussianPolyH.from_query(q)
    K = h.zero_pairs
    with mp.workprec(settings.default_precision_bits):
        first, second = _residue_values(h)
        next_pole = second / first * (2 * K + 3) / (2 * K + 1) / ((2 * K + 2) * (2 * K + 3))
        next_series = mp.mpf(1) / (2 * K + 2)
        half_y_max = mp.sqrt(TAIL_RATIO_LIMIT / (next_pole + next_series))
    return int(math.ceil(2 * math.pi * math.sqrt(q.n * q.m) / float(half_y_max)))


@lru_cache(maxsize=8)
def _divisor_counts(n_max: int) -> np.ndarray:
    d = np.zeros(n_max + 1, dtype=np.int64)
    for k in range(1, n_max + 1):
        d[k::k] += 1
    return d


def c_tail_bound(q: TraceQuery, c_max: int) -> float:
    """Bound on sum_{c > c_max} |S(+-n, m, c)| / c |int J^+-(sqrt(nm)/c, t) h(t) d*t / 2 pi|.

    The kernel integral is bounded by TAIL_SAFETY times its leading residue
    (2K + 1)/pi |h(-i(K + 1/2))| |J_{2K+1}(y)| (I_{2K+1} for the minus sign),
    and |S| by Weil. The sum runs exactly to 16 c_max; past that
    d(c) <= DIVISOR_CONSTANT c^(1/3) closes it.
    """
    h = GaussianPolyH.from_query(q)
    K = h.zero_pairs
    p = 2 * K + 1
    with mp.workprec(settings.default_precision_bits):
        first, _ = _residue_values(h)
        base = 2 * math.pi * math.sqrt(q.n * q.m)
        growth = math.exp((base / (c_max + 1)) ** 2)
        coefficient = float(TAIL_SAFETY * p * first / (mp.pi * mp.factorial(p))) * growth
    c_hi = 16 * c_max
    c = np.arange(c_max + 1, c_hi + 1, dtype=np.float64)
    d = _divisor_counts(c_hi)[c_max + 1 :]
    g = np.gcd(math.gcd(q.n, q.m), np.arange(c_max + 1, c_hi + 1))
    head = float(np.sum(d * np.sqrt(g) / np.sqrt(c) * (base / c) ** p))
    exponent = p - 5 / 6
    gcd_factor = math.sqrt(math.gcd(q.n, q.m))
    remainder = DIVISOR_CONSTANT * gcd_factor * base**p * c_hi ** (-exponent) / exponent
    return coefficient * (head + remainder)


def _kloosterman_terms(q: TraceQuery, grid: _TGrid, factors: list, c_values: range) -> list:
    signed_n = q.n if q.sign == "+" else -q.n
    terms = []
    for c in c_values:
        s = kloosterman(KloostermanQuery(n=signed_n, m=q.m, c=c))
        if abs(s) < 1e-9:
            terms.append((c, 0.0, mp.zero))
            continue
        y = 4 * mp.pi * mp.sqrt(mp.mpf(q.n * q.m)) / c
        terms.append((c, s, _kernel_integral(grid, factors, q.sign, y)))
    return terms


def geometric_side(q: TraceQuery, tail_target: float = C_TAIL_TARGET) -> GeometricSide:
    """Delta term, truncated Kloosterman sum and the bound on the rest.

    With ``q.c_max`` unset, c_max starts at max(C_START, tail_threshold) and
    doubles until the c-tail is below ``tail_target`` times the largest term,
    up to C_MAX_LIMIT.
    """
    require_level_one(q.spectrum)
    h = GaussianPolyH.from_query(q)
    threshold = tail_threshold(q)
    if q.c_max is not None and q.c_max < threshold:
        logger.warning(
            f"c_max={q.c_max} is below the residue threshold {threshold}; using {threshold}"
        )
    c_max = max(q.c_max or C_START, threshold)
    with mp.workprec(settings.default_precision_bits):
        grid = _TGrid.build(h)
        check_grid = _TGrid.build(h, GL_CHECK_NODES)
        factors = _kernel_factors(grid, q.sign)

        def delta_integrand(t, ht):
            return ht * t * mp.tanh(mp.pi * t)

        if q.sign == "+" and q.n == q.m:
            delta, delta_abs = grid.sum(delta_integrand)
            delta_check, _ = check_grid.sum(delta_integrand)
            delta /= mp.pi**2
            delta_error = abs(delta - delta_check / mp.pi**2) + mp.ldexp(delta_abs, 20 - mp.prec)
        else:
            delta, delta_error = mp.zero, mp.zero

        terms = _kloosterman_terms(q, grid, factors, range(1, c_max + 1))
        c_tail = c_tail_bound(q, c_max)
        while q.c_max is None and c_max < C_MAX_LIMIT:
            scale = max([abs(float(delta))] + [abs(s / c * float(v)) for c, s, v in terms])
            if c_tail <= tail_target * max(scale, 1e-300):
                break
            terms += _kloosterman_terms(q, grid, factors, range(c_max + 1, 2 * c_max + 1))
            c_max *= 2
            c_tail = c_tail_bound(q, c_max)
            logger.debug(f"c_max -> {c_max}: c-tail bound {c_tail:.3e}")
        else:
            if q.c_max is None:
                logger.warning(f"c_max reached its limit {C_MAX_LIMIT} with c-tail {c_tail:.3e}")

        kloos = mp.fsum(s / c * v for c, s, v in terms)

        # quadrature error: the kernel at the smallest and largest c on a finer rule
        check_factors = _kernel_factors(check_grid, q.sign)
        kernel_error = mp.zero
        for c in (1, c_max):
            y = 4 * mp.pi * mp.sqrt(mp.mpf(q.n * q.m)) / c
            coarse = _kernel_integral(grid, factors, q.sign, y)
            fine = _kernel_integral(check_grid, check_factors, q.sign, y)
            kernel_error = max(kernel_error, abs(coarse - fine))
        weight = sum(abs(s) / c for c, s, _ in terms)
        floor = mp.ldexp(sum(abs(s / c * v) for c, s, v in terms), 20 - mp.prec)
        quad_error = delta_error + weight * kernel_error + floor
    logger.debug(
        f"geometric side n={q.n} m={q.m} {q.sign}: delta {mpmath.nstr(delta, 12)}, "
        f"kloos {mpmath.nstr(kloos, 12)} to c={c_max}, c-tail {c_tail:.3e}"
    )
    return GeometricSide(
        delta=float(delta),
        kloos=float(kloos),
        c_tail=c_tail,
        c_max=c_max,
        quadrature_error=float(quad_error),
        terms=[(c, s, float(v)) for c, s, v in terms],
    )


def trace_residual(q: TraceQuery, tail_target: float = C_TAIL_TARGET) -> TraceLedger:
    """Both sides of the formula and the budget that bounds their difference."""
    spectral = spectral_side(q)
    geometric = geometric_side(q, tail_target)
    ledger = TraceLedger(
        n=q.n,
        m=q.m,
        sign=q.sign,
        spectral_cusp=spectral.cusp,
        spectral_eis=spectral.eis,
        delta_term=geometric.delta,
        kloosterman_sum=geometric.kloos,
        spectral_tail=spectral.tail,
        c_tail=geometric.c_tail,
        quadrature_error=spectral.quadrature_error + geometric.quadrature_error,
        c_max=geometric.c_max,
    )
    logger.info(str(ledger))
    return ledger


def _sign_label(sign: str) -> str:
    return "plus" if sign == "+" else "minus"


def ledger_report(ledger: TraceLedger, q: TraceQuery) -> VerificationReport:
    terms = ", ".join(f"{term.coef}*gauss(A={term.A}, K={term.K})" for term in q.h)
    return VerificationReport.build(
        check_id=f"kuznetsov.residual.{ledger.n}.{ledger.m}.{_sign_label(ledger.sign)}",
        module=MODULE,
        inputs={
            "n": ledger.n,
            "m": ledger.m,
            "sign": ledger.sign,
            "h": terms,
            "c_max": ledger.c_max,
            "t_max": q.spectrum.t_max,
        },
        lhs=ledger.spectral_cusp + ledger.spectral_eis,
        rhs=ledger.delta_term + ledger.kloosterman_sum,
        residual=ledger.residual,
        budget=ledger.truncation_budget,
        provenance=Provenance.DERIVED,
        notes=(
            f"spectral tail {ledger.spectral_tail:.3e}; c-tail {ledger.c_tail:.3e}; "
            f"quadrature {ledger.quadrature_error:.3e}"
        ),
    )


def ledger_json(ledger: TraceLedger) -> dict:
    """One JSON object with the ledger fields and the budget breakdown."""
    return {
        "n": ledger.n,
        "m": ledger.m,
        "sign": ledger.sign,
        "spectral_cusp": repr(ledger.spectral_cusp),
        "spectral_eis": repr(ledger.spectral_eis),
        "delta_term": repr(ledger.delta_term),
        "kloosterman_sum": repr(ledger.kloosterman_sum),
        "residual": repr(ledger.residual),
        "truncation_budget": repr(ledger.truncation_budget),
        "budget_breakdown": {
            "spectral_tail": repr(ledger.spectral_tail),
            "c_tail": repr(ledger.c_tail),
            "quadrature_error": repr(ledger.quadrature_error),
        },
        "c_max": ledger.c_max,
        "pass": ledger.passed,
    }


def write_ledgers(ledgers: Sequence[TraceLedger], path: Path) -> Path:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    payload = [ledger_json(ledger) for ledger in ledgers]
    text = json.dumps(payload, sort_keys=True, separators=(",", ":")) + "\n"
    path.write_text(text, encoding="utf-8")
    return path


# ---------------------------------------------------------------------------
# Linearity and symmetry


def _shared_c_max(queries: Sequence[TraceQuery]) -> int:
    return max([q.c_max or 64 for q in queries] + [tail_threshold(q) for q in queries])


def _ledger_sides(ledger: TraceLedger) -> tuple[float, float, float, float]:
    return ledger.spectral_cusp, ledger.spectral_eis, ledger.delta_term, ledger.kloosterman_sum


def linearity_audit(q1: TraceQuery, q2: TraceQuery) -> VerificationReport:
    """Ledgers of h1, h2 and h1 + h2 at a shared c_max: every side adds up."""
    if (q1.n, q1.m, q1.sign) != (q2.n, q2.m, q2.sign):
        raise DomainError("linearity compares test functions on the same (n, m, sign)")
    c_max = _shared_c_max([q1, q2, q1.model_copy(update={"h": q1.h + q2.h})])
    queries = [q.model_copy(update={"c_max": c_max}) for q in (q1, q2)]
    queries.append(queries[0].model_copy(update={"h": q1.h + q2.h}))
    ledgers = [trace_residual(q) for q in queries]
    defect = max(
        abs(a + b - s) for a, b, s in zip(*(_ledger_sides(ledger) for ledger in ledgers))
    )
    tolerance = sum(ledger.quadrature_error for ledger in ledgers) + 1e-12 * max(
        ledger.largest_term for ledger in ledgers
    )
    return VerificationReport.build(
        check_id="kuznetsov.linearity",
        module=MODULE,
        inputs={"n": q1.n, "m": q1.m, "sign": q1.sign, "c_max": c_max},
        lhs=defect,
        rhs=0,
        residual=defect,
        budget=tolerance,
        provenance=Provenance.TRIVIAL,
    )


def symmetry_audit(q: TraceQuery) -> VerificationReport:
    """Exchanging n and m leaves every side unchanged."""
    c_max = _shared_c_max([q])
    forward = trace_residual(q.model_copy(update={"c_max": c_max}))
    backward = trace_residual(q.model_copy(update={"n": q.m, "m": q.n, "c_max": c_max}))
    defect = max(abs(a - b) for a, b in zip(_ledger_sides(forward), _ledger_sides(backward)))
    tolerance = forward.quadrature_error + backward.quadrature_error + 1e-12 * forward.largest_term
    return VerificationReport.build(
        check_id="kuznetsov.symmetry",
        module=MODULE,
        inputs={"n": q.n, "m": q.m, "sign": q.sign, "c_max": c_max},
        lhs=defect,
        rhs=0,
        residual=defect,
        budget=tolerance,
        provenance=Provenance.TRIVIAL,
    )


# ---------------------------------------------------------------------------
# Kloosterman sums against a bump


EXPANSION_T_CUT = 16.0
EXPANSION_T_PANEL = 0.5
EXPANSION_T_NODES = 12
EXPANSION_CHECK_NODES = 8
# transform envelope beyond the scanned range falls at least like t^-ENVELOPE_POWER
ENVELOPE_POWER = 4
HOLOMORPHIC_MIN_WEIGHT = 12
PETERSSON_C_MAX = 64


def _bump_transform(b: BumpSpec, mode: Literal["hat", "check"], t, phi: LogBumpH) -> mpmath.mpf:
    """hat(t) or check(t) for real t > 0 by Gauss-Legendre in v = ln(wX)/width.

    hat(t) = -(1/sinh pi t) int Im J_2it(w) Phi(w) dw/w, the J_-2it half being
    the conjugate; check(t) = (2/pi) cosh(pi t) int K_2it(w) Phi(w) dw/w.
    """
    width = b.half_width
    panels = int(math.ceil(4 * float(t) * width / 3)) + 4
    nodes, weights = gl_panel_nodes(uniform_panels(-1.0, 1.0, panels), GL_NODES)
    total = mp.zero
    for v, weight in zip(nodes, weights):
        w = mp.exp(width * mp.mpf(float(v))) / b.X
        g = mp.mpf(float(weight)) * phi(w)
        if g == 0:
            continue
        if mode == "hat":
            total += g * bessel_J_mp(mp.mpc(0, 2 * t), w).imag
        else:
            total += g * bessel_K_mp(t, w)
    scale = b.Y * width
    if mode == "hat":
        return -scale * total / mp.sinh(mp.pi * t)
    return scale * 2 / mp.pi * mp.cosh(mp.pi * t) * total


def bump_transform(
    b: BumpSpec,
    mode: Literal["hat", "check"],
    t: float,
    precision_bits: Optional[int] = None,
) -> float:
    if mode not in ("hat", "check"):
        raise DomainError(f"expansion transforms are hat or check, got {mode!r}")
    if t <= 0:
        raise DomainError(f"fixed-rule transforms need t > 0, got {t}")
    with mp.workprec(precision_bits or settings.default_precision_bits):
        return float(_bump_transform(b, mode, mp.mpf(t), LogBumpH.for_bump(b)))


def _c_window(b: BumpSpec, n: int, m: int) -> tuple[int, int]:
    """Moduli c with 4 pi sqrt(nm)/c inside the support of Phi."""
    lo, hi = b.support
    scale = 4 * math.pi * math.sqrt(n * m)
    return math.floor(scale / hi) + 1, math.ceil(scale / lo) - 1


def expansion_geometric_side(b: BumpSpec, n: int, m: int, sign: str, level: int = 1) -> float:
    """sum_c S(n, +-m, level c)/(level c) Phi(4 pi sqrt(nm)/c).

    A finite sum: only c with 4 pi sqrt(nm)/c in the support of Phi contribute.
    """
    if level != 1:
        raise UnsupportedLevelError(f"Kloosterman expansions at level {level} need newform bases")
    phi = LogBumpH.for_bump(b)
    c_lo, c_hi = _c_window(b, n, m)
    with mp.workprec(settings.default_precision_bits):
        total = mp.zero
        for c in range(max(c_lo, 1), c_hi + 1):
            s = kloosterman(KloostermanQuery(n=n, m=m if sign == "+" else -m, c=c))
            total += s / c * b.Y * phi(4 * mp.pi * mp.sqrt(mp.mpf(n * m)) / c)
    return float(total)


def holomorphic_bound(b: BumpSpec, n: int, m: int) -> float:
    """Bound on the weight k >= 12 terms, which need no eigenvalue data.

    Each weight contributes (k - 1)/pi |dot(k)| sum_f omega_f |lambda_f(n) lambda_f(m)|,
    with |dot(k)| <= 2 Y width (w_max/2)^(k-1)/(k-1)!, Deligne's
    |lambda_f(n)| <= d(n), and sum_f omega_f taken from Petersson with n = m = 1
    and the Weil bound.
    """
    w_max = b.support[1]
    amplitude = len(_divisors(n)) * len(_divisors(m))
    total = 0.0
    k = HOLOMORPHIC_MIN_WEIGHT
    with mp.workprec(settings.default_precision_bits):
        while True:
            dot = 2 * b.Y * b.half_width * (w_max / 2) ** (k - 1) / math.factorial(k - 1)
            dimension = k // 12 - (1 if k % 12 == 2 else 0)
            if dimension > 0:
                petersson = 1 + 2 * math.pi * sum(
                    len(_divisors(c)) / math.sqrt(c) * abs(float(mp.besselj(k - 1, 4 * mp.pi / c)))
                    for c in range(1, PETERSSON_C_MAX + 1)
                )
                total += (k - 1) / math.pi * dot * amplitude * petersson
            if dot < 1e-30 and k > w_max:
                return total
            k += 2


def _envelope_tail(values: list, nodes: list, t0: float, density: Callable) -> float:
    """int_{t0}^oo density(t) env(t) dt from transform samples on [0, t_cut].

    env is twice the largest sample within one unit of t; past the last node
    it continues as env(t_cut) (t_cut/t)^ENVELOPE_POWER.
    """
    t_cut = float(nodes[-1])
    samples = np.array([float(t) for t in nodes])
    magnitudes = np.array([abs(float(v)) for v in values])
    total = 0.0
    a = t0
    while a < t_cut:
        b = min(a + EXPANSION_T_PANEL, t_cut)
        window = (samples >= a - 1) & (samples <= b + 1)
        env = 2 * float(magnitudes[window].max()) if window.any() else 0.0
        total += env * density(b) * (b - a)
        a = b
    window = samples >= t_cut - 1
    last = 2 * float(magnitudes[window].max())
    beyond = integrate(
        lambda t: density(t) * last * (t_cut / t) ** ENVELOPE_POWER,
        [mp.mpf(max(t0, t_cut)), mp.inf],
        method="tanh-sinh",
        what="transform envelope",
    )
    return total + float(abs(beyond.value))


def kloosterman_expansion(
    b: BumpSpec,
    n: int,
    m: int,
    sign: Literal["+", "-"],
    spectrum: SpectrumFile,
    level: int = 1,
    t_cut: float = EXPANSION_T_CUT,
) -> ExpansionLedger:
    """sum_c S(n, +-m, c)/c Phi(4 pi sqrt(nm)/c) against its spectral expansion.

    The plus sign expands over holomorphic forms (bounded), Maass forms with
    hat(t_j) 4 pi sqrt(nm) rho(n) conj(rho(-m)) / cosh(pi t_j) and the
    Eisenstein integral of hat; the minus sign uses check and has no
    holomorphic part. Coefficients come from lambda_j through
    4 pi |rho_j(1)|^2 / cosh(pi t_j) = 2 pi / L(1, sym^2 u_j), and the
    Eisenstein density is lambda(n, t) lambda(m, t) / |zeta(1 + 2it)|^2.

    Raises:
        UnsupportedLevelError: level other than 1
        IncompleteSpectrumError: the spectrum is not flagged complete
    """
    if level != 1:
        raise UnsupportedLevelError(f"Kloosterman expansions at level {level} need newform bases")
    require_level_one(spectrum)
    if not spectrum.complete:
        raise IncompleteSpectrumError("the spectral expansion needs every form below t_max")
    if sign not in ("+", "-"):
        raise DomainError(f"sign must be + or -, got {sign!r}")
    mode = "hat" if sign == "+" else "check"
    phi = LogBumpH.for_bump(b)
    c_lo, c_hi = _c_window(b, n, m)
    amplitude = len(_divisors(n)) * len(_divisors(m)) * (n * m) ** RAMANUJAN_EXPONENT
    with mp.workprec(settings.default_precision_bits):
        geometric = expansion_geometric_side(b, n, m, sign)

        maass = mp.zero
        for r in spectrum.records:
            if max(n, m) > r.n_max:
                raise InsufficientDataError(
                    f"eigenvalues of {r}", needed=max(n, m), available=r.n_max
                )
            weight, _ = _cusp_weight(r)
            second = r.eigenvalue(-m) if sign == "+" else r.eigenvalue(m)
            transform = _bump_transform(b, mode, mp.mpf(str(r.t_j)), phi)
            maass += 2 * mp.pi * weight * r.eigenvalue(n) * second * transform

        points = uniform_panels(0.0, t_cut, int(math.ceil(t_cut / EXPANSION_T_PANEL)))
        xs, ws = gl_panel_nodes(points, EXPANSION_T_NODES)
        nodes = [mp.mpf(float(x)) for x in xs]
        transforms = [_bump_transform(b, mode, t, phi) for t in nodes]
        integrand = [
            mp.mpf(float(w)) * tr * _eisenstein_lambda(n, m, t)
            / abs(zeta_mp(mp.mpc(1, 2 * t))) ** 2
            for t, w, tr in zip(nodes, ws, transforms)
        ]
        eisenstein = 2 * mp.fsum(integrand)
        mass = mp.fsum(abs(v) for v in integrand)
        local = mp.fsum(abs(v) for t, v in zip(nodes, integrand) if t < b.T**b.eps)
        share = float(local / mass) if mass else 1.0

        # a lower-degree rule on the same panels bounds the t-quadrature error
        cx, cw = gl_panel_nodes(points, EXPANSION_CHECK_NODES)

        def coarse_term(t, w):
            t = mp.mpf(float(t))
            return (
                mp.mpf(float(w)) * _bump_transform(b, mode, t, phi)
                * _eisenstein_lambda(n, m, t) / abs(zeta_mp(mp.mpc(1, 2 * t))) ** 2
            )

        coarse_value = 2 * mp.fsum(coarse_term(t, w) for t, w in zip(cx, cw))
        quad_error = abs(eisenstein - coarse_value) + mp.ldexp(mass, 20 - mp.prec)

        t_max = float(spectrum.t_max)

        def maass_density(t):
            log_t = math.log(float(t) + math.e)
            return 2 * math.pi * amplitude * (t / 6 + WEYL_SLACK) * INV_L1_CONSTANT * log_t

        def eis_density(t):
            divisors = len(_divisors(n)) * len(_divisors(m))
            return 2 * divisors * (INV_ZETA_CONSTANT * math.log(float(t) + math.e)) ** 2

        maass_tail = _envelope_tail(transforms, nodes, t_max, maass_density)
        eis_tail = _envelope_tail(transforms, nodes, t_cut, eis_density)
    ledger = ExpansionLedger(
        n=n,
        m=m,
        sign=sign,
        level=level,
        c_range=(c_lo, c_hi),
        geometric=float(geometric),
        maass=float(maass),
        eisenstein=float(eisenstein),
        holomorphic_bound=holomorphic_bound(b, n, m) if sign == "+" else 0.0,
        maass_tail=maass_tail,
        eisenstein_tail=eis_tail,
        quadrature_error=float(quad_error),
        localized_share=min(1.0, share),
    )
    ratio = ledger.ratio
    logger.info(f"{ledger}; geometric/spectral {ratio if ratio is None else f'{ratio:.6g}'}")
    return ledger


def expansion_report(ledger: ExpansionLedger, b: BumpSpec) -> VerificationReport:
    ratio = ledger.ratio
    return VerificationReport.build(
        check_id=f"kuznetsov.expansion.{ledger.n}.{ledger.m}.{_sign_label(ledger.sign)}",
        module=MODULE,
        inputs={
            "n": ledger.n,
            "m": ledger.m,
            "sign": ledger.sign,
            "X": b.X,
            "Y": b.Y,
            "width": b.half_width,
            "level": ledger.level,
        },
        lhs=ledger.geometric,
        rhs=ledger.spectral,
        residual=ledger.residual,
        budget=ledger.truncation_budget,
        provenance=Provenance.DERIVED,
        notes=(
            f"geometric/spectral ratio {'n/a' if ratio is None else f'{ratio:.6g}'}; "
            f"share of |t| < T^eps {ledger.localized_share:.3f}; "
            f"c in [{ledger.c_range[0]}, {ledger.c_range[1]}]"
        ),
    )
