"""Quadrature helpers shared by the kernel and transform modules.

Two families are provided:

* mpmath-backed panelled integration (Gauss-Legendre or tanh-sinh) with an
  error estimate, used wherever extended precision matters;
* numpy Gauss-Legendre node tables for bulk double-precision sums.

Vertical-line integrals (1/2 pi i) * int f(s) ds with Gaussian damping are
evaluated with the trapezoid rule, whose error decays like exp(-2 pi d / h)
for a strip of analyticity of half-width d.
"""

from dataclasses import dataclass
from functools import lru_cache
from typing import Callable, Optional, Sequence

import mpmath
import numpy as np
from mpmath import mp

from maasslab.errors import QuadratureBudgetError
from maasslab.utils.logger import get_logger

logger = get_logger(__name__)


@dataclass(frozen=True)
class QuadResult:
    """Integral value with its estimated absolute error."""

    value: mpmath.mpc
    error: mpmath.mpf

    def check(self, budget: float, what: str = "quadrature") -> "QuadResult":
        """Raise QuadratureBudgetError when the estimate exceeds ``budget``."""
        if self.error > budget:
            raise QuadratureBudgetError(what, float(self.error), float(budget))
        return self


def geometric_panels(a: float, b: float, ratio: float = 1.2, first: Optional[float] = None) -> list:
    """Breakpoints a = p0 < p1 < ... < pn = b with panel widths growing by ``ratio``."""
    if b <= a:
        raise ValueError(f"empty interval [{a}, {b}]")
    width = first if first is not None else min(1.0, (b - a) / 8)
    points = [mp.mpf(a)]
    while points[-1] + width < b:
        points.append(points[-1] + width)
        width *= ratio
    points.append(mp.mpf(b))
    return points


def uniform_panels(a: float, b: float, count: int) -> list:
    return [mp.mpf(a) + (mp.mpf(b) - a) * k / count for k in range(count + 1)]


def integrate(
    f: Callable,
    points: Sequence,
    method: str = "gauss-legendre",
    budget: Optional[float] = None,
    what: str = "quadrature",
    maxdegree: Optional[int] = None,
) -> QuadResult:
    """Integrate ``f`` over consecutive panels given by ``points``.

    Args:
        f: Integrand taking an mpf
        points: Panel breakpoints (``mpmath.inf`` allowed as last point)
        method: ``gauss-legendre`` or ``tanh-sinh``
        budget: Absolute error budget; exceeding it raises QuadratureBudgetError
        what: Label used in errors and debug logs
        maxdegree: Optional mpmath degree cap

    Returns:
        QuadResult with mpmath's error estimate
    """
    kwargs = {"method": method, "error": True}
    if maxdegree is not None:
        kwargs["maxdegree"] = maxdegree
    value, error = mp.quad(f, list(points), **kwargs)
    result = QuadResult(value, mp.mpf(error))
    logger.debug(f"{what}: {len(points) - 1} panels, error estimate {mpmath.nstr(result.error, 3)}")
    if budget is not None:
        result.check(budget, what)
    return result


def vertical_line(
    f: Callable,
    sigma: float,
    im_cut: float,
    step: float,
    symmetric: bool = False,
) -> mpmath.mpc:
    """(1/2 pi i) * int_{sigma - i im_cut}^{sigma + i im_cut} f(s) ds by the trapezoid rule.

    With ``symmetric=True`` the integrand is assumed to satisfy
    f(conj s) = conj f(s), so only the upper half is evaluated and twice the
    real part is returned.
    """
    n = int(mp.ceil(im_cut / step))
    h = mp.mpf(step)
    if symmetric:
        total = f(mp.mpc(sigma, 0)).real / 2
        for k in range(1, n + 1):
            total += f(mp.mpc(sigma, k * h)).real
        return mp.mpc(total * h / mp.pi, 0)
    total = mp.mpc(0)
    for k in range(-n, n + 1):
        total += f(mp.mpc(sigma, k * h))
    return total * h / (2 * mp.pi)


@lru_cache(maxsize=32)
def leggauss(n: int) -> tuple[np.ndarray, np.ndarray]:
    """Cached numpy Gauss-Legendre nodes and weights on [-1, 1]."""
    return np.polynomial.legendre.leggauss(n)


def gl_nodes(a: float, b: float, n: int) -> tuple[np.ndarray, np.ndarray]:
    """Gauss-Legendre nodes/weights mapped to [a, b]."""
    x, w = leggauss(n)
    half = 0.5 * (b - a)
    return half * x + 0.5 * (a + b), half * w


def gl_panel_nodes(points: Sequence[float], n: int) -> tuple[np.ndarray, np.ndarray]:
    """Concatenate Gauss-Legendre nodes over consecutive panels."""
    xs, ws = [], []
    for a, b in zip(points[:-1], points[1:]):
        x, w = gl_nodes(float(a), float(b), n)
        xs.append(x)
        ws.append(w)
    return np.concatenate(xs), np.concatenate(ws)


def fixed_gl(f: Callable, points: Sequence[float], n: int) -> mpmath.mpc:
    """Fixed-degree panelled Gauss-Legendre sum of an mpmath integrand.

    Nodes and weights are double precision, so the rule itself is accurate to
    about 1e-16 relative; the integrand keeps its own working precision.
    """
    nodes, weights = gl_panel_nodes(points, n)
    return mp.fsum(mp.mpf(float(w)) * f(mp.mpf(float(x))) for x, w in zip(nodes, weights))
