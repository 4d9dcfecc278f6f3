"""Exact arithmetic: Moebius, lambda(n, t), Kloosterman sums and GL(3) Hecke relations.

Tables returned here are numpy arrays indexed by n (slot 0 unused). The checks
take plain sequences with seq[n - 1] = lambda(n), so pass ``table[1:]``;
``CoefficientTable`` is 1-based. Integer inputs stay integers, so Hecke and
Kloosterman identities on integer data are checked with zero tolerance.
"""

import math
from collections import Counter
from dataclasses import dataclass
from functools import lru_cache
from typing import Callable, Iterable, Sequence

import numpy as np
import sympy

from maasslab.errors import InsufficientDataError, TableExhaustedError
from maasslab.models import CoefficientTable, KloostermanQuery
from maasslab.utils.logger import get_logger

logger = get_logger(__name__)


# ---------------------------------------------------------------------------
# elementary functions


def xgcd(a: int, b: int) -> tuple[int, int, int]:
    """Return (g, x, y) with a*x + b*y = g = gcd(a, b)."""
    old_r, r = a, b
    old_x, x = 1, 0
    old_y, y = 0, 1
    while r != 0:
        q, rem = divmod(old_r, r)
        old_r, r = r, rem
        old_x, x = x, old_x - q * x
        old_y, y = y, old_y - q * y
    if old_r < 0:
        return -old_r, -old_x, -old_y
    return old_r, old_x, old_y


def mod_inv(a: int, m: int) -> int:
    """Inverse of a modulo m; m need not be prime."""
    if m == 1:
        return 0
    g, x, _ = xgcd(a % m, m)
    if g != 1:
        raise ValueError(f"{a} has no inverse modulo {m}")
    return x % m


def mobius(n: int) -> int:
    if n < 1:
        raise ValueError("mobius needs n >= 1")
    factors = sympy.factorint(n)
    if any(e > 1 for e in factors.values()):
        return 0
    return -1 if len(factors) % 2 else 1


def divisor_count(n: int) -> int:
    return int(sympy.divisor_count(n))


def d3(n: int) -> int:
    """Number of ordered triples (a, b, c) with abc = n."""
    return math.prod((e + 1) * (e + 2) // 2 for e in sympy.factorint(n).values())


def primes_up_to(n: int) -> np.ndarray:
    if n < 2:
        return np.array([], dtype=np.int64)
    sieve = np.ones(n + 1, dtype=bool)
    sieve[:2] = False
    for p in range(2, int(n**0.5) + 1):
        if sieve[p]:
            sieve[p * p :: p] = False
    return np.nonzero(sieve)[0]


def mobius_sieve(n_max: int) -> np.ndarray:
    """mu(n) for 0 <= n <= n_max (mu[0] = 0)."""
    mu = np.ones(n_max + 1, dtype=np.int64)
    mu[0] = 0
    for p in primes_up_to(n_max):
        mu[p::p] *= -1
        mu[p * p :: p * p] = 0
    return mu


def multiplicative_table(n_max: int, local: Callable[[int, int], Sequence[float]]) -> np.ndarray:
    """Extend a multiplicative function from prime powers to 1..n_max.

    Args:
        n_max: Table length
        local: ``local(p, k_max)`` returns [f(1), f(p), ..., f(p^k_max)]

    Returns:
        float array with slot 0 set to 0
    """
    table = np.ones(n_max + 1, dtype=np.float64)
    table[0] = 0.0
    for p in primes_up_to(n_max):
        p = int(p)
        k_max = 1
        while p ** (k_max + 1) <= n_max:
            k_max += 1
        values = local(p, k_max)
        for k in range(1, k_max + 1):
            pk = p**k
            idx = np.arange(pk, n_max + 1, pk)
            idx = idx[idx % (pk * p) != 0]
            table[idx] *= values[k]
    return table


# ---------------------------------------------------------------------------
# lambda(n, t) and synthetic Hecke sequences


def lambda_div(n: int, t: float) -> float:
    """lambda(n, t) = sum_{ab = n} (a/b)^{it}, a real number."""
    if n < 1:
        raise ValueError("lambda_div needs n >= 1")
    return float(sum(math.cos(t * math.log(d * d / n)) for d in sympy.divisors(n)))


def lambda_div_table(t: float, n_max: int) -> np.ndarray:
    """lambda(n, t) for n <= n_max, pairing a <= b so only sqrt(n_max) numpy passes are needed."""
    lam = np.zeros(n_max + 1, dtype=np.float64)
    for a in range(1, math.isqrt(n_max) + 1):
        b = np.arange(a, n_max // a + 1)
        weight = np.where(b == a, 1.0, 2.0)
        lam[a * b] += weight * np.cos(t * (math.log(a) - np.log(b)))
    return lam


def eisenstein_eigenvalues(t: float, n_max: int) -> np.ndarray:
    """Hecke eigenvalues of the Eisenstein series with spectral parameter t."""
    return lambda_div_table(t, n_max)


def _chebyshev_powers(x: float, k_max: int) -> list[float]:
    """lambda(p^k) from lambda(p) = x by lambda(p^{k+1}) = x lambda(p^k) - lambda(p^{k-1})."""
    values = [1.0, x]
    for _ in range(2, k_max + 1):
        values.append(x * values[-1] - values[-2])
    return values[: k_max + 1]


def hecke_sequence_from_primes(prime_values: dict[int, float], n_max: int) -> np.ndarray:
    """Full GL(2) eigenvalue table from its values at primes."""
    missing = [int(p) for p in primes_up_to(n_max) if int(p) not in prime_values]
    if missing:
        raise InsufficientDataError(
            "prime eigenvalue missing",
            needed=missing[0],
            available=max(prime_values, default=0),
        )
    return multiplicative_table(n_max, lambda p, k: _chebyshev_powers(prime_values[p], k))


def sato_tate_prime_values(p_max: int, seed: int) -> dict[int, float]:
    """Seeded Satake angles drawn from the Sato-Tate law (2/pi) sin^2 theta."""
    rng = np.random.default_rng(seed)
    values = {}
    for p in primes_up_to(p_max):
        while True:
            theta, u = rng.uniform(0, math.pi), rng.uniform(0, 1)
            if u <= math.sin(theta) ** 2:
                break
        values[int(p)] = 2.0 * math.cos(theta)
    return values


def sato_tate_eigenvalues(n_max: int, seed: int) -> np.ndarray:
    """A synthetic Hecke-consistent eigenvalue sequence (slot 0 unused)."""
    return hecke_sequence_from_primes(sato_tate_prime_values(n_max, seed), n_max)


@lru_cache(maxsize=4)
def ramanujan_tau(n_max: int) -> tuple[int, ...]:
    """tau(n) for 0 <= n <= n_max (tau(0) = 0), exactly.

    Delta = q * P(q)^8 with P(q) = sum_k (-1)^k (2k+1) q^{k(k+1)/2}, the
    Jacobi form of eta^3; P is sparse, so seven sparse products suffice.
    """
    length = n_max
    sparse = []
    k = 0
    while k * (k + 1) // 2 < length:
        sparse.append((k * (k + 1) // 2, (-1) ** k * (2 * k + 1)))
        k += 1
    series = [0] * length
    for e, c in sparse:
        series[e] = c
    for _ in range(7):
        product = [0] * length
        for e, c in sparse:
            for i in range(length - e):
                if series[i]:
                    product[i + e] += c * series[i]
        series = product
    return (0,) + tuple(series)


def delta_prime_eigenvalues(p_max: int) -> dict[int, float]:
    """Normalised eigenvalues tau(p) / p^{11/2} of the level-1 cusp form Delta."""
    tau = ramanujan_tau(p_max)
    return {int(p): tau[p] / float(p) ** 5.5 for p in primes_up_to(p_max)}


def delta_eigenvalues(n_max: int) -> np.ndarray:
    return hecke_sequence_from_primes(delta_prime_eigenvalues(n_max), n_max)


# ---------------------------------------------------------------------------
# Kloosterman sums


def _inverse_mod_array(x: np.ndarray, c: int) -> np.ndarray:
    """Elementwise inverses of units x modulo c by a vectorised extended Euclid."""
    old_r = np.full_like(x, c)
    r = x.copy()
    old_s = np.zeros_like(x)
    s = np.ones_like(x)
    while np.any(r != 0):
        nz = r != 0
        q = np.zeros_like(r)
        q[nz] = old_r[nz] // r[nz]
        old_r, r = np.where(nz, r, old_r), np.where(nz, old_r - q * r, r)
        old_s, s = np.where(nz, s, old_s), np.where(nz, old_s - q * s, s)
    return old_s % c


@lru_cache(maxsize=256)
def _units_and_inverses(c: int) -> tuple[np.ndarray, np.ndarray]:
    x = np.arange(c, dtype=np.int64)
    units = x[np.gcd(x, c) == 1]
    if c == 1:
        return units, units.copy()
    return units, _inverse_mod_array(units, c)


def kloosterman_phase_array(n: int, m: int, c: int) -> np.ndarray:
    units, inverses = _units_and_inverses(c)
    return (n % c * units + m % c * inverses) % c


def kloosterman_phases(n: int, m: int, c: int) -> Counter:
    """The residue multiset {n x + m xbar mod c}; S(n, m, c) = sum of e(r/c) over it."""
    return Counter(kloosterman_phase_array(n, m, c).tolist())


def kloosterman(q: KloostermanQuery) -> float:
    """S(n, m, c) = sum_{x mod c, (x, c) = 1} e((n x + m xbar)/c).

    The sum is real; the imaginary residue is asserted below 2^-40 of the
    number of terms.
    """
    phases = kloosterman_phase_array(q.n, q.m, q.c)
    angles = 2 * np.pi * phases / q.c
    imag = float(np.sum(np.sin(angles)))
    assert abs(imag) <= 1e-9 * max(1, phases.size), f"S{q} imaginary residue {imag}"
    return float(np.sum(np.cos(angles)))


def weil_bound(n: int, m: int, c: int) -> float:
    """d(c) gcd(n, m, c)^{1/2} c^{1/2}."""
    return divisor_count(c) * math.sqrt(math.gcd(math.gcd(n, m), c)) * math.sqrt(c)


def kloosterman_multiplicative_phases(n: int, m: int, c1: int, c2: int) -> Counter:
    """Phase multiset of S(n cbar2^2, m, c1) S(n cbar1^2, m, c2) as residues mod c1 c2."""
    c = c1 * c2
    a = kloosterman_phases(n * mod_inv(c2, c1) ** 2, m, c1) if c1 > 1 else Counter({0: 1})
    b = kloosterman_phases(n * mod_inv(c1, c2) ** 2, m, c2) if c2 > 1 else Counter({0: 1})
    product: Counter = Counter()
    for ra, ka in a.items():
        for rb, kb in b.items():
            product[(ra * c2 + rb * c1) % c] += ka * kb
    return product


# ---------------------------------------------------------------------------
# GL(2) and GL(3) Hecke relations


def _value(seq: Sequence, n: int):
    """seq holds lambda(n) at position n - 1."""
    if n > len(seq):
        raise TableExhaustedError("eigenvalue table exhausted", needed=n, available=len(seq))
    return seq[n - 1]


def hecke_gl2_defects(
    lam: Sequence, tol: float = 0.0, weight: int = 0
) -> list[tuple[int, int, float]]:
    """(m, n, defect) for every mn <= len(lam) violating the Hecke relation

    lambda(m)lambda(n) = sum_{d|(m,n)} d^w lambda(mn/d^2).

    ``weight`` = 11 checks unnormalised tau; 0 is the normalised relation.
    """
    n_max = len(lam)
    failures = []
    for m in range(1, n_max + 1):
        for n in range(m, n_max // m + 1):
            g = math.gcd(m, n)
            rhs = sum(d**weight * _value(lam, m * n // (d * d)) for d in sympy.divisors(g))
            defect = abs(_value(lam, m) * _value(lam, n) - rhs)
            if defect > tol:
                failures.append((m, n, float(defect)))
    return failures


def kim_sarnak_violations(lam: Sequence, tol: float = 0.0) -> list[tuple[int, float, float]]:
    """(p, |lambda(p)|, bound) for primes with |lambda(p)| > p^{7/64} + p^{-7/64} + tol."""
    out = []
    for p in primes_up_to(len(lam)):
        p = int(p)
        bound = p ** (7 / 64) + p ** (-7 / 64)
        value = abs(float(_value(lam, p)))
        if value > bound + tol:
            out.append((p, value, bound))
    return out


def hecke_gl3(table: CoefficientTable, n: int, m: int) -> float:
    """A_f(n, m) = sum_{v | (n, m)} mu(v) A(n/v, 1) A(m/v, 1)."""
    if n < 1 or m < 1:
        raise ValueError("indices must be positive")
    total = 0.0
    for v in sympy.divisors(math.gcd(n, m)):
        mu = mobius(v)
        if mu == 0:
            continue
        a, b = n // v, m // v
        for index in (a, b):
            if index > table.n_max:
                raise TableExhaustedError(
                    "GL(3) Hecke expansion", needed=index, available=table.n_max
                )
        total += mu * table[a] * table[b]
    return total


def sym2_lift(lambda_f: Sequence, n_max: int, source_form_id: str = "gl2") -> CoefficientTable:
    """A(n, 1) = sum_{d^2 k = n} lambda_f(k^2) from a GL(2) sequence (lambda_f[n-1] = lambda(n))."""
    if len(lambda_f) < n_max * n_max:
        raise InsufficientDataError(
            "sym2_lift needs lambda_f up to n_max^2",
            needed=n_max * n_max,
            available=len(lambda_f),
        )
    squares = [lambda_f[k * k - 1] for k in range(1, n_max + 1)]
    A1 = [0] * n_max
    d = 1
    while d * d <= n_max:
        for k in range(1, n_max // (d * d) + 1):
            A1[d * d * k - 1] += squares[k - 1]
        d += 1
    return CoefficientTable(source_form_id=source_form_id, A1=tuple(float(a) for a in A1))


def sym2_table_from_primes(
    prime_values: dict[int, float], n_max: int, source_form_id: str
) -> CoefficientTable:
    """Symmetric-square table from lambda(p) via 1/(1 - eX + eX^2 - X^3), e = lambda(p)^2 - 1."""

    def local(p: int, k_max: int) -> list[float]:
        e = prime_values[p] ** 2 - 1
        values = [1.0]
        for k in range(1, k_max + 1):
            a1 = values[k - 1]
            a2 = values[k - 2] if k >= 2 else 0.0
            a3 = values[k - 3] if k >= 3 else 0.0
            values.append(e * a1 - e * a2 + a3)
        return values

    missing = [int(p) for p in primes_up_to(n_max) if int(p) not in prime_values]
    if missing:
        raise InsufficientDataError(
            "prime eigenvalue missing",
            needed=missing[0],
            available=max(prime_values, default=0),
        )
    table = multiplicative_table(n_max, local)
    return CoefficientTable(source_form_id=source_form_id, A1=tuple(table[1:].tolist()))


def eisenstein_sym2_coefficients(t: float, n_max: int) -> CoefficientTable:
    """A(n, 1) = sum_{d | n} lambda(d, 2t): L(s) = zeta(s + 2it) zeta(s) zeta(s - 2it)."""
    lam2 = lambda_div_table(2 * t, n_max)
    A1 = np.zeros(n_max + 1)
    for d in range(1, n_max + 1):
        A1[d::d] += lam2[d]
    return CoefficientTable(
        source_form_id=f"eisenstein(t={t})", A1=tuple(A1[1:].tolist()), eisenstein_t=t
    )


def delta_sym2_table(n_max: int) -> CoefficientTable:
    """Symmetric-square coefficients of the weight 12 cusp form Delta."""
    return sym2_table_from_primes(delta_prime_eigenvalues(n_max), n_max, "delta")


# ---------------------------------------------------------------------------
# Dirichlet-series identities


def gl3_rearrangement_defects(table: CoefficientTable, n_max: int) -> list[tuple[int, float]]:
    """(N, defect) where sum_{m r^2 = N} A(m, r) != sum_{v^3 m r^2 = N} mu(v) A(m, 1) A(r, 1)."""
    failures = []
    for N in range(1, n_max + 1):
        lhs = 0.0
        r = 1
        while r * r <= N:
            if N % (r * r) == 0:
                lhs += hecke_gl3(table, N // (r * r), r)
            r += 1
        rhs = 0.0
        v = 1
        while v**3 <= N:
            mu = mobius(v)
            if mu and N % v**3 == 0:
                rest = N // v**3
                r = 1
                while r * r <= rest:
                    if rest % (r * r) == 0:
                        rhs += mu * table[rest // (r * r)] * table[r]
                    r += 1
            v += 1
        if lhs != rhs and abs(lhs - rhs) > 1e-9 * max(1.0, abs(lhs)):
            failures.append((N, abs(lhs - rhs)))
    return failures


def rankin_selberg_defects(
    lam: Sequence, table: CoefficientTable, tol: float = 0.0
) -> list[tuple[int, float]]:
    """(n, defect) where lambda(n)^2 != sum_{k^2 | n} mu(k) sum_{b | n/k^2} A(b, 1)."""
    n_max = min(len(lam), table.n_max)
    failures = []
    for n in range(1, n_max + 1):
        rhs = 0.0
        k = 1
        while k * k <= n:
            mu = mobius(k) if n % (k * k) == 0 else 0
            if mu:
                rhs += mu * sum(table[b] for b in sympy.divisors(n // (k * k)))
            k += 1
        defect = abs(lam[n - 1] ** 2 - rhs)
        if defect > tol:
            failures.append((n, float(defect)))
    return failures


# ---------------------------------------------------------------------------
# cancellation statistics


@dataclass(frozen=True)
class CancellationRow:
    x: int
    partial_sum: float
    normalized: float

    CSV_HEADER = ("x", "partial_sum", "normalized")

    def csv_row(self) -> list:
        return [self.x, repr(self.partial_sum), repr(self.normalized)]


@dataclass(frozen=True)
class SecondMomentRow:
    x: int
    sum_sq: float
    bound: float

    @property
    def ok(self) -> bool:
        return self.sum_sq <= self.bound


def cancellation_stat(table: CoefficientTable, x_values: Iterable[int]) -> list[CancellationRow]:
    """Partial sums sum_{m <= x} A(m, 1) and their ratio to x^{1/2}."""
    cumulative = np.cumsum(np.asarray(table.A1))
    rows = []
    for x in x_values:
        x = int(x)
        if x < 1 or x > table.n_max:
            raise InsufficientDataError(
                "cancellation_stat beyond table", needed=x, available=table.n_max
            )
        partial = float(cumulative[x - 1])
        rows.append(CancellationRow(x=x, partial_sum=partial, normalized=partial / math.sqrt(x)))
    return rows


def second_moment_stat(
    table: CoefficientTable,
    x_values: Iterable[int],
    T: float,
    constant: float = 100.0,
    eps: float = 0.05,
) -> list[SecondMomentRow]:
    """sum_{n <= x} |A(n, 1)|^2 against constant * x * (T x)^{2 eps}."""
    cumulative = np.cumsum(np.asarray(table.A1) ** 2)
    rows = []
    for x in x_values:
        x = int(x)
        if x > table.n_max:
            raise InsufficientDataError(
                "second_moment_stat beyond table", needed=x, available=table.n_max
            )
        bound = constant * x * (T * x) ** (2 * eps)
        rows.append(SecondMomentRow(x=x, sum_sq=float(cumulative[x - 1]), bound=bound))
    return rows
