"""Unit tests for spectrum ingestion and L(1, sym^2) partial sums."""

from decimal import Decimal

import pytest


def _hecke_record(prime_values, n_max, t=12.0, parity="even", L1_sym2=None):
    from maasslab.core.arith import hecke_sequence_from_primes
    from maasslab.core.spectra import synthetic_record

    lam = hecke_sequence_from_primes(prime_values, n_max)[1:]
    return synthetic_record(t, lam, parity=parity, L1_sym2=L1_sym2)


SAMPLE = """\
# two synthetic forms
level=1
t_max=15
complete=0
form t=13.779751351890738 parity=odd
lam 1 1
lam 2 0
lam 3 0
lam 4 -1
form t=9.533695261353557 parity=even L1sym2=0.5
lam 1 1.0
lam 2 0.0
lam 3 0.0
"""


@pytest.mark.unit
class TestLoadSpectrum:
    """Tests for the spectrum file parser."""

    def test_empty_spectrum(self):
        from maasslab.core.spectra import parse_spectrum

        spectrum = parse_spectrum("level=1\nt_max=0\ncomplete=1\n")
        assert spectrum.records == ()
        assert spectrum.complete

    def test_bundled_window(self):
        """Test the shipped level-1 window loads as a complete empty spectrum."""
        from config.settings import settings
        from maasslab.core.spectra import load_spectrum

        spectrum = load_spectrum(settings.spectrum_path)
        assert spectrum.level == 1
        assert spectrum.complete
        assert spectrum.records == ()
        assert spectrum.t_max == Decimal("9.5")

    def test_records_sorted_and_exact(self):
        from maasslab.core.spectra import parse_spectrum

        spectrum = parse_spectrum(SAMPLE)
        assert [str(r.t_j) for r in spectrum.records] == ["9.533695261353557", "13.779751351890738"]
        assert spectrum.records[0].L1_sym2 == Decimal("0.5")
        assert spectrum.records[1].eigenvalue(-4) == 1.0

    def test_round_trip(self, tmp_path):
        from maasslab.core.spectra import dump_spectrum, load_spectrum, parse_spectrum

        spectrum = parse_spectrum(SAMPLE)
        path = dump_spectrum(spectrum, tmp_path / "spectrum.txt")
        assert load_spectrum(path) == spectrum

    def test_hecke_violation_rejected(self):
        """Test a form with lambda(2)lambda(3) != lambda(6) fails naming the relation."""
        from maasslab.core.spectra import parse_spectrum
        from maasslab.errors import SpectrumValidationError

        text = "t_max=20\nform t=10 parity=even\n" + "\n".join(
            f"lam {n} {v}" for n, v in enumerate([1, 0.5, 0.5, -0.75, 0, 0.3], start=1)
        )
        with pytest.raises(SpectrumValidationError) as excinfo:
            parse_spectrum(text)
        assert excinfo.value.relation == "hecke_multiplicative"

    @pytest.mark.parametrize(
        "text, line_no",
        [
            ("t_max=10\nlam 1 1\n", 2),
            ("t_max=10\nform t=5 parity=even\nlam 1 1\nlam 3 0\n", 4),
            ("t_max=10\nform t=5 parity=even\nlam 1 abc\n", 3),
            ("t_max=10\nform t=5 parity=sideways\nlam 1 1\n", 2),
            ("t_max=10\nform t=5\nlam 1 1\n", 2),
            ("t_max=10\nbogus line here\n", 2),
        ],
    )
    def test_parse_errors_carry_line(self, text, line_no):
        from maasslab.core.spectra import parse_spectrum
        from maasslab.errors import SpectrumParseError

        with pytest.raises(SpectrumParseError) as excinfo:
            parse_spectrum(text)
        assert excinfo.value.line_no == line_no

    def test_record_above_window(self):
        from maasslab.core.spectra import parse_spectrum
        from maasslab.errors import SpectrumParseError

        with pytest.raises(SpectrumParseError):
            parse_spectrum("t_max=5\nform t=9 parity=even\nlam 1 1\n")

    def test_level_guard(self):
        from maasslab.core.spectra import parse_spectrum, require_level_one
        from maasslab.errors import UnsupportedLevelError

        with pytest.raises(UnsupportedLevelError):
            require_level_one(parse_spectrum("level=4\nt_max=0\n"))


@pytest.mark.unit
class TestValidateRecord:
    """Tests for validate_record."""

    def test_valid_record(self):
        from maasslab.core.spectra import validate_record

        record = _hecke_record({2: 1.2, 3: -0.4, 5: 0.9, 7: -1.7}, 10)
        assert validate_record(record, 1e-9) == []

    def test_kim_sarnak_failure_names_prime(self):
        from maasslab.core.spectra import validate_record

        record = _hecke_record({2: 3.0, 3: 0.5, 5: 0.1, 7: 0.2}, 10)
        failures = validate_record(record, 1e-9)
        assert [(f.relation, f.indices) for f in failures] == [("kim_sarnak", (2,))]

    def test_hecke_square_relation(self):
        """Test lambda(4) = lambda(2)^2 - 1 on valid records."""
        record = _hecke_record({2: 1.2, 3: -0.4}, 4)
        assert record.eigenvalue(4) == pytest.approx(record.eigenvalue(2) ** 2 - 1, abs=1e-12)

    def test_first_eigenvalue(self):
        from maasslab.core.spectra import synthetic_record, validate_record

        failures = validate_record(synthetic_record(10.0, [2.0]), 1e-9)
        assert failures[0].relation == "hecke_identity"

    def test_tolerance_positive(self):
        from maasslab.core.spectra import synthetic_record, validate_record

        with pytest.raises(ValueError):
            validate_record(synthetic_record(10.0, [1.0]), 0.0)


@pytest.mark.unit
class TestL1Sym2:
    """Tests for the L(1, sym^2) partial sum."""

    def test_degenerate_record_closed_form(self):
        """Test lambda(p) = 0: L(s, sym^2) = zeta(2s)^2 / zeta(s) vanishes at s = 1."""
        from maasslab.core.arith import primes_up_to
        from maasslab.core.spectra import l1_sym2

        record = _hecke_record({int(p): 0.0 for p in primes_up_to(2000)}, 2000)
        value, tail = l1_sym2(record, 2000)
        assert abs(value) <= tail

    def test_tail_monotone(self):
        from maasslab.core.spectra import sym2_tail_bound

        bounds = [sym2_tail_bound(n) for n in (500, 1000, 2000, 4000)]
        assert all(b > c for b, c in zip(bounds, bounds[1:]))
        assert sym2_tail_bound(10) == sym2_tail_bound(20)

    def test_insufficient_data(self):
        from maasslab.core.spectra import l1_sym2
        from maasslab.errors import InsufficientDataError

        record = _hecke_record({2: 0.3, 3: 0.1}, 4)
        with pytest.raises(InsufficientDataError):
            l1_sym2(record, 5)

    def test_discrepancy_report(self):
        from maasslab.core.spectra import l1_sym2, l1_sym2_discrepancy

        record = _hecke_record({2: 0.3, 3: 0.1, 5: -0.2, 7: 0.4}, 10, L1_sym2=1.0)
        value, _ = l1_sym2(record, 10)
        report = l1_sym2_discrepancy(record, 10)
        assert report.partial == value
        assert report.ratio == pytest.approx(1.0 / value)
        assert l1_sym2_discrepancy(_hecke_record({2: 0.3, 3: 0.1}, 4), 4) is None

    def test_envelope_holds_for_delta(self):
        """Test |A(n, 1)| <= n^(7/32) d_3(n) on the Delta symmetric square."""
        from maasslab.core.arith import delta_sym2_table
        from maasslab.core.spectra import d3_envelope

        table = delta_sym2_table(300)
        assert all(abs(table[n]) <= d3_envelope(n) + 1e-9 for n in range(1, 301))


@pytest.mark.unit
class TestWeylCount:
    """Tests for the Weyl-law audit."""

    def test_small_window_not_applicable(self):
        from config.settings import settings
        from maasslab.core.spectra import load_spectrum, weyl_count_check

        check = weyl_count_check(load_spectrum(settings.spectrum_path))
        assert check.count == 0
        assert not check.applicable
        assert check.ok

    def test_expected_count(self):
        import math

        from maasslab.core.spectra import weyl_expected

        assert weyl_expected(100.0) == pytest.approx(10000 / 12 - 200 / math.pi * math.log(100.0))
