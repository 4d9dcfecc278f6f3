"""Ingestion, validation and serialisation of level-1 Maass spectra.

File format (UTF-8, one directive per line, ``#`` starts a comment)::

    level=1
    t_max=9.5
    complete=1
    form t=9.53369526135355755434423523592877 parity=even L1sym2=0.8
    lam 1 1
    lam 2 1.549304477941275

``lam`` lines of a form must run n = 1, 2, ... without gaps.
"""

import math
from dataclasses import dataclass
from decimal import Decimal, InvalidOperation
from pathlib import Path
from typing import Iterable, Optional, Sequence, Union

from pydantic import ValidationError

from maasslab.core.arith import (
    d3,
    hecke_gl2_defects,
    kim_sarnak_violations,
    primes_up_to,
    sym2_table_from_primes,
)
from maasslab.errors import (
    InsufficientDataError,
    SpectrumParseError,
    SpectrumValidationError,
    UnsupportedLevelError,
)
from maasslab.models import MaassFormRecord, SpectrumFile, ValidationFailure
from maasslab.models.spectrum import Parity
from maasslab.utils.logger import get_logger

logger = get_logger(__name__)

# Below this t the T ln T term dominates the leading one and the count is meaningless
WEYL_MIN_T = 50.0


def _decimal(text: str, line_no: int, what: str) -> Decimal:
    try:
        value = Decimal(text)
    except InvalidOperation:
        raise SpectrumParseError(f"{what} is not a decimal: {text!r}", line_no) from None
    if not value.is_finite():
        raise SpectrumParseError(f"{what} is not finite: {text!r}", line_no)
    return value


def _parse_options(tokens: Sequence[str], line_no: int) -> dict[str, str]:
    options = {}
    for token in tokens:
        key, sep, value = token.partition("=")
        if not sep or not value:
            raise SpectrumParseError(f"expected key=value, got {token!r}", line_no)
        options[key] = value
    return options


class _FormBlock:
    def __init__(self, line_no: int, options: dict[str, str]):
        self.line_no = line_no
        self.options = options
        self.lam: list[Decimal] = []

    def build(self) -> MaassFormRecord:
        if "t" not in self.options or "parity" not in self.options:
            raise SpectrumParseError("form needs t= and parity=", self.line_no)
        unknown = set(self.options) - {"t", "parity", "L1sym2", "provenance"}
        if unknown:
            raise SpectrumParseError(f"unknown form fields {sorted(unknown)}", self.line_no)
        if not self.lam:
            raise SpectrumParseError("form has no lam lines", self.line_no)
        try:
            return MaassFormRecord(
                t_j=_decimal(self.options["t"], self.line_no, "t"),
                parity=self.options["parity"],
                lam=tuple(self.lam),
                L1_sym2=(
                    _decimal(self.options["L1sym2"], self.line_no, "L1sym2")
                    if "L1sym2" in self.options
                    else None
                ),
                provenance=self.options.get("provenance", ""),
            )
        except ValidationError as e:
            message = e.errors()[0]["msg"]
            raise SpectrumParseError(f"invalid form: {message}", self.line_no) from None


def parse_spectrum(text: str, tol: float = 1e-8) -> SpectrumFile:
    """Parse spectrum text and validate every record against ``tol``."""
    header: dict[str, str] = {}
    blocks: list[_FormBlock] = []
    for line_no, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        tokens = line.split()
        if tokens[0] == "form":
            blocks.append(_FormBlock(line_no, _parse_options(tokens[1:], line_no)))
        elif tokens[0] == "lam":
            if not blocks:
                raise SpectrumParseError("lam line before any form", line_no)
            if len(tokens) != 3:
                raise SpectrumParseError("expected 'lam <n> <decimal>'", line_no)
            block = blocks[-1]
            try:
                n = int(tokens[1])
            except ValueError:
                raise SpectrumParseError(
                    f"index is not an integer: {tokens[1]!r}", line_no
                ) from None
            if n != len(block.lam) + 1:
                expected = len(block.lam) + 1
                raise SpectrumParseError(f"expected lam index {expected}, got {n}", line_no)
            block.lam.append(_decimal(tokens[2], line_no, f"lam {n}"))
        elif len(tokens) == 1 and "=" in tokens[0]:
            if blocks:
                raise SpectrumParseError("header directive after the first form", line_no)
            header.update(_parse_options(tokens, line_no))
        else:
            raise SpectrumParseError(f"unrecognised line {line!r}", line_no)

    unknown = set(header) - {"level", "t_max", "complete"}
    if unknown:
        raise SpectrumParseError(f"unknown header fields {sorted(unknown)}", 1)
    if "t_max" not in header:
        raise SpectrumParseError("missing t_max header", 1)
    if header.get("complete", "0") not in ("0", "1"):
        raise SpectrumParseError("complete must be 0 or 1", 1)

    records = [block.build() for block in blocks]
    for block, record in zip(blocks, records):
        failures = validate_record(record, tol)
        if failures:
            first = failures[0]
            raise SpectrumValidationError(
                f"form at line {block.line_no} ({record}): {first}", relation=first.relation
            )
    try:
        spectrum = SpectrumFile(
            level=int(header.get("level", "1")),
            t_max=_decimal(header["t_max"], 1, "t_max"),
            complete=header.get("complete", "0") == "1",
            records=tuple(records),
        )
    except (ValueError, ValidationError) as e:
        raise SpectrumParseError(f"invalid spectrum: {e}", 1) from None
    logger.info(
        f"Loaded spectrum: level={spectrum.level}, t_max={spectrum.t_max}, "
        f"{len(spectrum.records)} forms, complete={spectrum.complete}"
    )
    return spectrum


def load_spectrum(path: Union[str, Path], tol: float = 1e-8) -> SpectrumFile:
    path = Path(path)
    logger.debug(f"Reading spectrum file {path}")
    return parse_spectrum(path.read_text(encoding="utf-8"), tol)


def dumps_spectrum(spectrum: SpectrumFile) -> str:
    lines = [
        f"level={spectrum.level}",
        f"t_max={spectrum.t_max}",
        f"complete={int(spectrum.complete)}",
    ]
    for record in spectrum.records:
        head = f"form t={record.t_j} parity={record.parity.value}"
        if record.L1_sym2 is not None:
            head += f" L1sym2={record.L1_sym2}"
        if record.provenance:
            head += f" provenance={record.provenance.replace(' ', '_')}"
        lines.append(head)
        lines.extend(f"lam {n} {value}" for n, value in enumerate(record.lam, start=1))
    return "\n".join(lines) + "\n"


def dump_spectrum(spectrum: SpectrumFile, path: Union[str, Path]) -> Path:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    path.write_text(dumps_spectrum(spectrum), encoding="utf-8")
    logger.info(f"Wrote {len(spectrum.records)} forms to {path}")
    return path


def validate_record(r: MaassFormRecord, tol: float) -> list[ValidationFailure]:
    """Structural checks of one record; never raises on a violated relation.

    Checks lambda(1) = 1, the Hecke relations for mn <= n_max and the
    Kim-Sarnak bound |lambda(p)| <= p^(7/64) + p^(-7/64) + tol.
    """
    if tol <= 0:
        raise ValueError(f"tol must be positive, got {tol}")
    lam = [float(v) for v in r.lam]
    failures: list[ValidationFailure] = []
    if abs(lam[0] - 1.0) > tol:
        failures.append(
            ValidationFailure(
                relation="hecke_identity",
                indices=(1,),
                discrepancy=abs(lam[0] - 1.0),
                detail="lambda(1) != 1",
            )
        )
    for m, n, defect in hecke_gl2_defects(lam, tol):
        failures.append(
            ValidationFailure(
                relation="hecke_multiplicative",
                indices=(m, n),
                discrepancy=defect,
                detail=f"lambda({m})lambda({n}) != sum over d | ({m},{n})",
            )
        )
    for p, value, bound in kim_sarnak_violations(lam, tol):
        failures.append(
            ValidationFailure(
                relation="kim_sarnak",
                indices=(p,),
                discrepancy=value - bound,
                detail=f"|lambda({p})| = {value:.6g} exceeds {bound:.6g}",
            )
        )
    if failures:
        logger.debug(f"{r}: {len(failures)} failed relations")
    return failures


def _tail_shape(n: float) -> float:
    return (1 + math.log(n)) ** 2 * n ** (-9 / 32)


# _tail_shape peaks where 1 + ln n = 64/9
_TAIL_PEAK = math.exp(64 / 9 - 1)


def sym2_tail_bound(n_cut: int) -> float:
    """Heuristic bound on sum_{n > n_cut} A(n, 1)/n.

    Partial sums of A(n, 1) are taken to be at most x^(1/2) times the pointwise
    bound n^(7/32) d_3(n) averaged as (log x)^2; the envelope is made
    non-increasing in n_cut.
    """
    return (32 / 9) * _tail_shape(max(float(n_cut), _TAIL_PEAK))


def l1_sym2(r: MaassFormRecord, n_cut: int) -> tuple[float, float]:
    """Partial sum of L(1, sym^2 u_j) = sum A(n, 1)/n and its tail bound.

    A(n, 1) is rebuilt from lambda(p), p <= n_cut, through the local
    symmetric-square recurrence, so only n_cut <= n_max eigenvalues are needed.
    """
    if n_cut < 1:
        raise ValueError(f"n_cut must be positive, got {n_cut}")
    if n_cut > r.n_max:
        raise InsufficientDataError(f"l1_sym2 for {r}", needed=n_cut, available=r.n_max)
    prime_values = {int(p): float(r.lam[int(p) - 1]) for p in primes_up_to(n_cut)}
    table = sym2_table_from_primes(prime_values, n_cut, source_form_id=f"t={r.t_j}")
    value = math.fsum(table[n] / n for n in range(1, n_cut + 1))
    tail = sym2_tail_bound(n_cut)
    if r.L1_sym2 is not None:
        provided = float(r.L1_sym2)
        logger.debug(
            f"{r}: L(1, sym^2) partial {value:.10g}, provided {provided:.10g}, "
            f"ratio {provided / value if value else float('nan'):.6g}, tail {tail:.3e}"
        )
    return value, tail


@dataclass
class L1Sym2Discrepancy:
    """Partial sum against a database value; ``ratio`` exposes normalisation mismatches."""

    partial: float
    provided: float
    tail_bound: float

    @property
    def difference(self) -> float:
        return abs(self.partial - self.provided)

    @property
    def ratio(self) -> float:
        return self.provided / self.partial if self.partial else float("nan")

    @property
    def ok(self) -> bool:
        return self.difference <= self.tail_bound


def l1_sym2_discrepancy(r: MaassFormRecord, n_cut: int) -> Optional[L1Sym2Discrepancy]:
    if r.L1_sym2 is None:
        return None
    value, tail = l1_sym2(r, n_cut)
    return L1Sym2Discrepancy(partial=value, provided=float(r.L1_sym2), tail_bound=tail)


@dataclass
class WeylCheck:
    """#{t_j <= t} against t^2/12 - (2/pi) t ln t."""

    t: float
    count: int
    expected: float
    applicable: bool

    @property
    def relative_deviation(self) -> float:
        if self.expected <= 0:
            return float("inf")
        return abs(self.count - self.expected) / self.expected

    @property
    def ok(self) -> bool:
        return not self.applicable or self.relative_deviation <= 0.25


def weyl_expected(t: float) -> float:
    if t <= 1:
        return 0.0
    return t * t / 12 - (2 / math.pi) * t * math.log(t)


def weyl_count_check(spectrum: SpectrumFile, t: Optional[float] = None) -> WeylCheck:
    """Weyl-law sanity audit at ``t`` (default t_max); only meaningful for complete spectra."""
    t_eval = float(spectrum.t_max) if t is None else t
    count = sum(1 for r in spectrum.records if float(r.t_j) <= t_eval)
    applicable = spectrum.complete and spectrum.level == 1 and t_eval >= WEYL_MIN_T
    check = WeylCheck(t=t_eval, count=count, expected=weyl_expected(t_eval), applicable=applicable)
    if not applicable:
        logger.debug(f"Weyl check at t={t_eval} not applicable (complete={spectrum.complete})")
    return check


def require_level_one(spectrum: SpectrumFile) -> SpectrumFile:
    if spectrum.level != 1:
        raise UnsupportedLevelError(f"level {spectrum.level} spectra are not supported")
    return spectrum


def synthetic_record(
    t: float,
    lam: Iterable[float],
    parity: Union[str, Parity] = Parity.EVEN,
    L1_sym2: Optional[float] = None,
    provenance: str = "synthetic",
) -> MaassFormRecord:
    """A record built from floats, for tests and dry runs."""
    return MaassFormRecord(
        t_j=Decimal(repr(float(t))),
        parity=parity,
        lam=tuple(Decimal(repr(float(v))) for v in lam),
        L1_sym2=None if L1_sym2 is None else Decimal(repr(float(L1_sym2))),
        provenance=provenance,
    )


def d3_envelope(n: int) -> float:
    """Pointwise bound n^(7/32) d_3(n) on |A(n, 1)|."""
    return n ** (7 / 32) * d3(n)
