"""Harmonic weights of the fourth moment.

H(t) is the Watson gamma quotient, evaluated in log space from real parts of
ln Gamma so that no individual factor overflows. W(t) is the smooth
restriction to T^(1-alpha) < |t| < 2T - T^(1-alpha), with the smoothing degree
carried by :class:`WeightParams`.
"""

import csv
import math
from dataclasses import dataclass, field
from pathlib import Path
from typing import Iterable, Optional, Sequence

import mpmath
import numpy as np
from mpmath import mp

from config.settings import settings
from maasslab.core.gamma import ln_gamma_mp
from maasslab.errors import DomainError
from maasslab.models import WeightParams, WeightSample
from maasslab.utils.logger import get_logger

logger = get_logger(__name__)

# exp(-700) is still a normal double; below it the value is reported as a bound
UNDERFLOW_LN = -700.0

H0_LEADING_CONSTANT = 4 * math.pi


def cutoff_q(t: float, T: float) -> float:
    """q(t, T): 0 for |t| <= 2T, else |t| - 2T."""
    if T <= 0:
        raise DomainError(f"T must be positive, got {T}")
    excess = abs(t) - 2 * T
    return excess if excess > 0 else 0.0


def ln_weight_H(t: float, T: float, precision_bits: Optional[int] = None) -> mpmath.mpf:
    """Natural log of H(t) at ``precision_bits`` (default precision if omitted)."""
    if T <= 0:
        raise DomainError(f"T must be positive, got {T}")
    bits = precision_bits or settings.default_precision_bits
    with mp.workprec(bits):
        t_mp = mp.mpf(t)
        T_mp = mp.mpf(T)
        quarter = mp.mpf(1) / 4
        a = ln_gamma_mp(mp.mpc(quarter, T_mp + t_mp / 2)).real
        b = ln_gamma_mp(mp.mpc(quarter, T_mp - t_mp / 2)).real
        c = ln_gamma_mp(mp.mpc(quarter, t_mp / 2)).real
        d = ln_gamma_mp(mp.mpc(mp.mpf(1) / 2, T_mp)).real
        e = ln_gamma_mp(mp.mpc(mp.mpf(1) / 2, t_mp)).real
        return +(2 * (a + b) + 4 * c - 4 * d - 2 * e)


def weight_H_eval(t: float, T: float, precision_bits: Optional[int] = None) -> tuple[float, bool]:
    """H(t) as a double together with the underflow flag.

    When ln H(t) < UNDERFLOW_LN the returned value is exp(UNDERFLOW_LN), a
    certified upper bound, and the flag is set.
    """
    ln_h = ln_weight_H(t, T, precision_bits)
    if ln_h < UNDERFLOW_LN:
        logger.debug(f"H({t}, T={T}) below exp({UNDERFLOW_LN}); returning bound")
        return math.exp(UNDERFLOW_LN), True
    return float(mp.exp(ln_h)), False


def weight_H_exact(t: float, T: float, precision_bits: Optional[int] = None) -> float:
    return weight_H_eval(t, T, precision_bits)[0]


def weight_H_asymptotic(t: float, T: float) -> float:
    """Stirling main term 8 pi exp(-pi q) / ((1+|t|) prod (1+|2T +- t|)^(1/2))."""
    q = cutoff_q(t, T)
    at = abs(t)
    denom = (1 + at) * math.sqrt((1 + abs(2 * T + at)) * (1 + abs(2 * T - at)))
    return float(8 * mp.pi * mp.exp(-mp.pi * q) / denom)


def stirling_H_envelope(t: float, T: float, constant: float = 10.0) -> float:
    """Relative error envelope C (1/(1+|t|) + 1/(1+|2T-t|) + 1/(1+|2T+t|))."""
    at = abs(t)
    return constant * (1 / (1 + at) + 1 / (1 + abs(2 * T - at)) + 1 / (1 + 2 * T + at))


def _smoothing_factor(x: mpmath.mpf, degree: int) -> mpmath.mpf:
    return -mp.expm1(-(x**degree))


def weight_W(t: float, p: WeightParams) -> float:
    """The product of the two smoothing factors; 0 at t = 0 and at |t| = 2T."""
    T = mp.mpf(p.T)
    t_mp = mp.mpf(t)
    first = _smoothing_factor(t_mp / (2 * T) ** (1 - mp.mpf(p.alpha) / 2), p.smoothing_degree)
    second = _smoothing_factor(
        (4 * T**2 - t_mp**2) / (4 * T ** (2 - mp.mpf(p.alpha) / 2)), p.smoothing_degree
    )
    value = float(first * second)
    return min(max(value, 0.0), 1.0)


def plateau_margin(p: WeightParams) -> float:
    """Smallest x^(2N) of the two smoothing factors at the plateau edges.

    |W - 1| <= T^-100 on the plateau once this reaches 100 ln T.
    """
    lo, hi = p.plateau
    T = p.T
    x_first = lo / (2 * T) ** (1 - p.alpha / 2)
    x_second = (4 * T**2 - hi**2) / (4 * T ** (2 - p.alpha / 2))
    x_min = min(x_first, x_second)
    if x_min <= 0:
        return 0.0
    return float(mp.mpf(x_min) ** p.smoothing_degree)


def plateau_regime_ok(p: WeightParams) -> bool:
    return plateau_margin(p) >= 100 * math.log(p.T)


def plateau_defect(p: WeightParams, points: int = 200) -> float:
    """max |W(t) - 1| on an interior grid of the plateau."""
    lo, hi = p.plateau
    if hi <= lo:
        raise DomainError(f"empty plateau for T={p.T}, alpha={p.alpha}")
    grid = np.linspace(lo, hi, points + 2)[1:-1]
    return max(abs(weight_W(float(t), p) - 1.0) for t in grid)


def profile_H0(x: float, T: float, precision_bits: Optional[int] = None) -> float:
    """2T^2 H(2Tx), the rescaled profile of H on (0, 1)."""
    if not 0 < x < 1:
        raise DomainError(f"profile_H0 needs 0 < x < 1, got {x}")
    bits = precision_bits or settings.default_precision_bits
    with mp.workprec(bits):
        return float(2 * mp.mpf(T) ** 2 * mp.exp(ln_weight_H(2 * T * x, T, bits)))


def profile_H0_leading(x: float) -> float:
    """4 pi / (x (1 - x^2)^(1/2)), the leading term of :func:`profile_H0`."""
    if not 0 < x < 1:
        raise DomainError(f"profile_H0 needs 0 < x < 1, got {x}")
    return H0_LEADING_CONSTANT / (x * math.sqrt(1 - x * x))


def weight_sample(t: float, p: WeightParams) -> WeightSample:
    h_exact, underflow = weight_H_eval(t, p.T)
    h_asym = weight_H_asymptotic(t, p.T)
    return WeightSample(
        t=t,
        H_exact=h_exact,
        H_asymptotic=h_asym,
        W=weight_W(t, p),
        q=cutoff_q(t, p.T),
        underflow=underflow,
        rel_err=None if underflow else abs(h_asym - h_exact) / h_exact,
    )


def weight_sweep(ts: Iterable[float], p: WeightParams) -> list[WeightSample]:
    """Evaluate the weights on a grid, preserving grid order."""
    samples = [weight_sample(float(t), p) for t in ts]
    logger.info(f"Weight sweep: {len(samples)} points at T={p.T}, alpha={p.alpha}")
    return samples


def write_weight_csv(samples: Sequence[WeightSample], path: Path) -> Path:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    with path.open("w", newline="", encoding="utf-8") as fh:
        writer = csv.writer(fh)
        writer.writerow(WeightSample.CSV_HEADER)
        for sample in samples:
            writer.writerow(sample.csv_row())
    logger.info(f"Wrote {len(samples)} weight samples to {path}")
    return path


@dataclass
class DerivativeAudit:
    """Worst ratio |f^(k)(t)| / (C T^-2 T^(k(-1+alpha))) over a grid."""

    order: int
    target: str
    max_ratio: float
    worst_t: float
    regime_ok: bool = True
    ratios: list[float] = field(default_factory=list, repr=False)

    @property
    def ok(self) -> bool:
        return self.max_ratio <= 1.0


def _central_difference(f, t: mpmath.mpf, h: mpmath.mpf, order: int) -> mpmath.mpf:
    if order == 1:
        return (f(t + h) - f(t - h)) / (2 * h)
    if order == 2:
        return (f(t + h) - 2 * f(t) + f(t - h)) / (h * h)
    raise DomainError(f"finite differences implemented for orders 1 and 2, got {order}")


def derivative_audit(
    p: WeightParams,
    order: int,
    constant: float = 100.0,
    points: int = 60,
    include_W: bool = False,
) -> DerivativeAudit:
    """Audit d^k/dt^k of H (or H W) against C T^-2 (T^(-1+alpha))^k on the W-range.

    Differences use step 10^-2 / T at the default working precision. With
    ``include_W`` the smoothing factor is included; its transition width only
    reaches T^(1-alpha) once the smoothing degree is small relative to
    T^alpha, so ``regime_ok`` records whether that holds.
    """
    lo, hi = p.wrange
    if hi <= lo:
        raise DomainError(f"empty range for T={p.T}, alpha={p.alpha}")
    target = "HW" if include_W else "H"
    budget = constant * p.T**-2 * p.T ** (order * (-1 + p.alpha))
    with mp.workprec(settings.default_precision_bits):
        h = mp.mpf(10) ** -2 / p.T

        def f(t: mpmath.mpf) -> mpmath.mpf:
            value = mp.exp(ln_weight_H(t, p.T))
            if include_W:
                value *= mp.mpf(weight_W(float(t), p))
            return value

        ratios: list[float] = []
        worst, worst_t = 0.0, lo
        for t in np.linspace(lo, hi, points):
            ratio = float(abs(_central_difference(f, mp.mpf(float(t)), h, order)) / budget)
            ratios.append(ratio)
            if ratio > worst:
                worst, worst_t = ratio, float(t)
    regime_ok = not include_W or p.smoothing_degree <= p.T**p.alpha
    logger.debug(
        f"derivative audit {target}^({order}) T={p.T}: max ratio {worst:.3e} at t={worst_t:.3f}"
    )
    return DerivativeAudit(
        order=order,
        target=target,
        max_ratio=worst,
        worst_t=worst_t,
        regime_ok=regime_ok,
        ratios=ratios,
    )


def profile_derivative_audit(
    T: float, alpha: float, constant: float = 100.0, points: int = 60
) -> DerivativeAudit:
    """|H0'(x)| <= C T^alpha on T^-alpha <= x <= 1 - T^-alpha."""
    lo, hi = T**-alpha, 1 - T**-alpha
    if hi <= lo:
        raise DomainError(f"empty profile range for T={T}, alpha={alpha}")
    budget = constant * T**alpha
    grid = np.linspace(lo, hi, points)
    with mp.workprec(settings.default_precision_bits):
        h = mp.mpf(10) ** -4

        def f(x: mpmath.mpf) -> mpmath.mpf:
            return 2 * mp.mpf(T) ** 2 * mp.exp(ln_weight_H(2 * T * x, T))

        ratios = [
            float(abs(_central_difference(f, mp.mpf(float(x)), h, 1)) / budget) for x in grid
        ]
    idx = int(np.argmax(ratios))
    return DerivativeAudit(
        order=1, target="H0", max_ratio=ratios[idx], worst_t=float(grid[idx]), ratios=ratios
    )


@dataclass
class DecayAudit:
    """H(t) e^(pi q) / H(2T) beyond the transition, expected within [1/C, C]."""

    T: float
    min_ratio: float
    max_ratio: float
    constant: float

    @property
    def ok(self) -> bool:
        return self.min_ratio >= 1 / self.constant and self.max_ratio <= self.constant


def decay_audit(T: float, constant: float = 100.0, points: int = 25) -> DecayAudit:
    """Sample 2T + 10 ln T <= t <= 2T + 20 ln T in log space."""
    ln_ref = ln_weight_H(2 * T, T)
    ts = np.linspace(2 * T + 10 * math.log(T), 2 * T + 20 * math.log(T), points)
    ratios = [
        float(mp.exp(ln_weight_H(float(t), T) + mp.pi * cutoff_q(float(t), T) - ln_ref))
        for t in ts
    ]
    return DecayAudit(T=T, min_ratio=min(ratios), max_ratio=max(ratios), constant=constant)
