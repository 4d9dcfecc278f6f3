"""Unit tests for imaginary-order Bessel functions, transforms and averages."""

import math

import numpy as np
import pytest
from mpmath import mp


@pytest.mark.unit
class TestBesselJ:
    """Tests for J_2it."""

    def test_order_zero(self):
        from maasslab.core.bessel import bessel_J_imag

        assert bessel_J_imag(0.0, 0.0, 128).value == 1
        with mp.workprec(128):
            value = bessel_J_imag(0.0, 3.0, 128).value
            assert abs(value - mp.besselj(0, 3)) < mp.mpf(2) ** -110

    @pytest.mark.parametrize("t, x", [(0.25, 0.5), (1.5, 7.0), (4.0, 25.0)])
    def test_matches_mpmath(self, t, x):
        from maasslab.core.bessel import bessel_J_imag

        ours = bessel_J_imag(t, x, 128).value
        with mp.workprec(256):
            oracle = mp.besselj(mp.mpc(0, 2 * t), x)
            assert abs(ours - oracle) < mp.mpf(2) ** -100 * abs(oracle)

    def test_conjugate_order(self):
        """Test J_-2it(x) = conj(J_2it(x)) for real t and x."""
        from maasslab.core.bessel import bessel_J_imag

        a = bessel_J_imag(3.0, 12.0, 128).value
        b = bessel_J_imag(-3.0, 12.0, 128).value
        with mp.workprec(128):
            assert abs(b - mp.conj(a)) < mp.mpf(2) ** -110 * abs(a)

    def test_negative_argument(self):
        from maasslab.core.bessel import bessel_J_imag
        from maasslab.errors import DomainError

        with pytest.raises(DomainError):
            bessel_J_imag(1.0, -1.0)
        with pytest.raises(DomainError):
            bessel_J_imag(1.0, 0.0)

    @pytest.mark.parametrize("t, x", [(0.5, 1.0), (5.0, 20.0), (12.0, 60.0)])
    def test_series_matches_schlafli(self, t, x):
        from maasslab.core.bessel import bessel_J_cross_check

        assert bessel_J_cross_check(t, x, 128) <= 2.0 ** (48 - 128)

    @pytest.mark.slow
    def test_series_matches_schlafli_window_edge(self):
        from maasslab.core.bessel import bessel_J_cross_check

        assert bessel_J_cross_check(30.0, 100.0, 128) <= 2.0 ** (48 - 128)

    def test_cross_check_window(self):
        from maasslab.core.bessel import bessel_J_cross_check
        from maasslab.errors import DomainError

        with pytest.raises(DomainError):
            bessel_J_cross_check(1.0, 500.0)

    def test_precision_ceiling(self, monkeypatch):
        from config.settings import settings
        from maasslab.core.bessel import bessel_J_imag
        from maasslab.errors import PrecisionExhaustedError

        monkeypatch.setattr(settings, "max_precision_bits", 256)
        with pytest.raises(PrecisionExhaustedError) as excinfo:
            bessel_J_imag(1.0, 500.0, 128)
        assert excinfo.value.required_bits > 256


@pytest.mark.unit
class TestBesselK:
    """Tests for K_2it."""

    def test_k0_at_one(self):
        """Test K_0(1) from the series, the integral at two node counts and mpmath."""
        from maasslab.core.bessel import bessel_K_imag, bessel_K_integral_mp

        series = bessel_K_imag(0.0, 1.0, 128)
        with mp.workprec(128):
            coarse = bessel_K_integral_mp(0, 1)
            fine = bessel_K_integral_mp(0, 1, node_scale=2)
            oracle = mp.besselk(0, 1)
            assert abs(series - oracle) < mp.mpf(10) ** -20
            assert abs(coarse - fine) < mp.mpf(10) ** -20
            assert abs(coarse - series) < mp.mpf(10) ** -20

    @pytest.mark.parametrize("t, x", [(0.5, 1.0), (1.0, 3.0), (5.0, 10.0)])
    def test_matches_mpmath(self, t, x):
        from maasslab.core.bessel import bessel_K_imag

        ours = bessel_K_imag(t, x, 128)
        with mp.workprec(256):
            oracle = mp.besselk(mp.mpc(0, 2 * t), x).real
            assert abs(ours - oracle) < mp.mpf(2) ** -100 * abs(oracle)

    def test_real_and_even(self):
        from maasslab.core.bessel import bessel_K_imag

        a = bessel_K_imag(3.0, 5.0, 128)
        assert isinstance(a, mp.mpf)
        assert a == bessel_K_imag(-3.0, 5.0, 128)

    def test_series_matches_integral(self):
        """Test the I-series and integral representations agree below the switch point."""
        from maasslab.core.bessel import bessel_K_integral_mp, bessel_K_mp

        with mp.workprec(128):
            for t in (0.0, 2.0, 20.0):
                series = bessel_K_mp(t, 50.0)
                integral = bessel_K_integral_mp(t, 50.0)
                assert abs(series - integral) < mp.mpf(2) ** -100 * abs(series)

    def test_nonpositive_argument(self):
        from maasslab.core.bessel import bessel_K_imag
        from maasslab.errors import DomainError

        with pytest.raises(DomainError):
            bessel_K_imag(1.0, 0.0)


@pytest.mark.unit
class TestKernels:
    """Tests for the Kuznetsov kernels J+ and J-."""

    def test_plus_conjugate_symmetry(self):
        """Test J+(x, -t) = conj(J+(x, t)) on a 50-point grid, both orders evaluated."""
        from maasslab.core.bessel import kernel_J_plus

        rng = np.random.default_rng(20240601)
        for x, t in zip(rng.uniform(0.05, 2.0, 50), rng.uniform(0.5, 10.0, 50)):
            a = kernel_J_plus(float(x), float(t), 128).value
            b = kernel_J_plus(float(x), float(-t), 128).value
            with mp.workprec(128):
                assert abs(b - mp.conj(a)) <= mp.mpf(2) ** -100 * abs(a)

    def test_plus_pole(self):
        from maasslab.core.bessel import kernel_J_plus
        from maasslab.errors import DomainError

        with pytest.raises(DomainError):
            kernel_J_plus(1.0, 0.0)

    def test_minus_bounded(self):
        """Test |J-(x, t)| <= 10 for t in [1, 30] and x in [t/10, 10t]."""
        from maasslab.core.bessel import kernel_J_minus

        for t in (1.0, 5.0, 15.0, 30.0):
            for x in (t / 10, t, 10 * t):
                assert abs(kernel_J_minus(x, t, 128)) <= 10


@pytest.mark.unit
class TestLogBump:
    """Tests for the log-scaled bump family."""

    def test_even_with_compact_support(self):
        from maasslab.core.bessel import LogBumpH

        h = LogBumpH(1.0, 0.5)
        assert h(1.0) == 1
        assert h(-1.3) == h(1.3)
        assert h(math.exp(0.5)) == 0
        assert h(0.5) == 0

    def test_first_derivative(self):
        from maasslab.core.bessel import LogBumpH

        h = LogBumpH(1.0, 0.5)
        with mp.workprec(128):
            eps = mp.mpf(10) ** -12
            y = mp.mpf(1.2)
            difference = (h(y + eps) - h(y - eps)) / (2 * eps)
            assert abs(difference - h.derivative(y, 1)) < mp.mpf(10) ** -15
            assert h.derivative(-y, 1) == -h.derivative(y, 1)

    def test_hbar_third_derivative_vanishes_at_center(self):
        """Test (y h)''' = 3 h'' + h''' = 0 at y = 1, since h''(1) = -2/w^2 and h'''(1) = 6/w^2."""
        from maasslab.core.bessel import LogBumpH

        h = LogBumpH(1.0, 0.6)
        with mp.workprec(128):
            assert abs(h.derivative(1, 2) + 2 / mp.mpf(0.6) ** 2) < mp.mpf(10) ** -25
            assert abs(h.hbar(1, 3)) < mp.mpf(10) ** -25

    @pytest.mark.parametrize("center, half_width", [(1.0, 0.5), (0.01, 1.0), (1.0, 0.2 * 2.3)])
    def test_bounded_at_float_support_edges(self, center, half_width):
        """Test points just inside the float support stay in [0, 1] at 128 bits."""
        from maasslab.core.bessel import LogBumpH

        h = LogBumpH(center, half_width)
        lo, hi = h.support
        with mp.workprec(128):
            for k in range(30, 60):
                step = mp.mpf(2) ** -k
                for y in (mp.mpf(hi) * (1 - step), mp.mpf(lo) * (1 + step)):
                    value = h(y)
                    assert 0 <= value <= 1, (k, y, value)
                    for order in (1, 2, 3):
                        assert abs(h.derivative(y, order)) < 1e6, (k, order)
                        assert abs(h.hbar(y, order)) < 1e6, (k, order)

    def test_integral_over_support_is_finite(self):
        """Test int h(w) dw/w over the float support equals the v-integral of b."""
        from maasslab.core.bessel import LogBumpH

        h = LogBumpH(1.0, 0.5)
        lo, hi = h.support
        with mp.workprec(128):
            value = mp.quad(lambda w: h(w) / w, [lo, 1, hi])
            expected = 0.5 * mp.quad(lambda v: mp.exp(1 - 1 / (1 - v * v)), [-1, 0, 1])
            assert abs(value - expected) < mp.mpf(10) ** -10

    def test_invalid(self):
        from maasslab.core.bessel import LogBumpH
        from maasslab.errors import DomainError

        with pytest.raises(DomainError):
            LogBumpH(1.0, 0.0)

    def test_for_spec_support(self):
        from maasslab.core.bessel import LogBumpH
        from maasslab.models import TransformSpec

        spec = TransformSpec(T=10.0, alpha=0.2)
        lo, hi = LogBumpH.for_spec(spec).support
        assert lo == pytest.approx(spec.support[0])
        assert hi == pytest.approx(spec.support[1])

    def test_derivative_audit(self):
        """Test the calibrated constant holds and wider bumps need less of it."""
        from maasslab.core.bessel import h_derivative_audit
        from maasslab.models import TransformSpec

        narrow = h_derivative_audit(TransformSpec(T=10.0, alpha=0.2), points=200)
        wide = h_derivative_audit(TransformSpec(T=40.0, alpha=0.5), points=200)
        assert narrow.ok, narrow.ratios
        assert sorted(narrow.ratios) == [1, 2, 3, 4]
        assert wide.max_ratio <= narrow.max_ratio

    def test_phi_audit(self):
        from maasslab.core.bessel import phi_derivative_audit
        from maasslab.models import BumpSpec

        assert phi_derivative_audit(BumpSpec(X=10.0, width=1.0), points=200).ok


@pytest.mark.unit
class TestPhiTransforms:
    """Tests for the dot, hat and check transforms."""

    def test_dot_bound(self):
        from maasslab.core.bessel import transform_bound_report
        from maasslab.models import BumpSpec

        report = transform_bound_report(BumpSpec(X=1.0), "dot", [2, 4])
        assert report.passed, report

    @pytest.mark.parametrize("mode", ["hat", "check"])
    def test_real_order_bound(self, mode):
        from maasslab.core.bessel import transform_bound_report
        from maasslab.models import BumpSpec

        report = transform_bound_report(BumpSpec(X=1.0), mode, [0.5, 1.0, 2.0])
        assert report.passed, report

    @pytest.mark.parametrize("mode", ["hat", "check"])
    def test_exceptional_order_bound(self, mode):
        from maasslab.core.bessel import transform_bound_report
        from maasslab.models import BumpSpec

        report = transform_bound_report(BumpSpec(X=100.0), mode, [7j / 128])
        assert report.passed, report

    def test_exceptional_order_is_real(self):
        from maasslab.core.bessel import phi_transforms
        from maasslab.models import BumpSpec

        value = phi_transforms(BumpSpec(X=100.0), "hat", 7j / 128)
        assert abs(value.imag) <= 1e-20 * abs(value.real)

    def test_hat_limit_at_zero(self):
        """Test hat(0) = -int Y_0 Phi dw/w is the limit of hat(t)."""
        from maasslab.core.bessel import phi_transforms
        from maasslab.models import BumpSpec

        b = BumpSpec(X=1.0)
        assert abs(phi_transforms(b, "hat", 0.0) - phi_transforms(b, "hat", 1e-6)) <= 1e-8

    def test_hat_decay(self):
        from maasslab.core.bessel import phi_transforms, transform_decay_report
        from maasslab.models import BumpSpec

        b = BumpSpec(X=1.0, width=1.0)
        assert abs(phi_transforms(b, "hat", 30.0)) <= 1e-3 * abs(phi_transforms(b, "hat", 0.5))
        report = transform_decay_report(b, 30.0)
        assert report.passed
        assert not report.regime_ok

    @pytest.mark.parametrize(
        "mode, order",
        [
            ("dot", 3),
            ("dot", 0),
            ("hat", 0.2j),
            ("hat", 1 + 1j),
            ("check", -0.5j),
            ("sideways", 1.0),
        ],
    )
    def test_order_validation(self, mode, order):
        from maasslab.core.bessel import phi_transforms
        from maasslab.errors import DomainError
        from maasslab.models import BumpSpec

        with pytest.raises(DomainError):
            phi_transforms(BumpSpec(X=1.0), mode, order)


@pytest.mark.unit
class TestBesselAverages:
    """Tests for the J and K Bessel averages."""

    def test_jbes_at_square(self):
        """Test x = T^2, T = 10, alpha = 0.2 stays within 100 x / T^(3-12 alpha)."""
        from maasslab.core.bessel import jbes_report
        from maasslab.models import TransformSpec

        spec = TransformSpec(T=10.0, alpha=0.2, precision_bits=128, node_budget=8)
        report = jbes_report(spec, 100.0)
        assert report.passed, report

    def test_jbes_negligibility_window(self):
        from maasslab.core.bessel import jbes_negligibility
        from maasslab.errors import DomainError
        from maasslab.models import TransformSpec

        spec = TransformSpec(T=10.0, alpha=0.2, precision_bits=128, node_budget=8)
        report = jbes_negligibility(spec, 5.0)
        assert report.passed, report
        with pytest.raises(DomainError):
            jbes_negligibility(spec, 30.0)

    def test_kbes_at_midpoint(self):
        from maasslab.core.bessel import kbes_report
        from maasslab.models import TransformSpec

        spec = TransformSpec(T=20.0, alpha=0.2)
        report = kbes_report(spec, spec.T / math.pi)
        assert report.passed, report
        assert "x^2 term dominant" in report.notes

    def test_kbes_second_term_small(self):
        from maasslab.core.bessel import kbes_main_terms
        from maasslab.models import TransformSpec

        spec = TransformSpec(T=20.0, alpha=0.2)
        first, second, _ = kbes_main_terms(spec, spec.T / math.pi)
        assert abs(first) >= spec.T**2 / 20 * abs(second)

    @pytest.mark.slow
    @pytest.mark.parametrize("u", [0.8, 1.3])
    def test_kbes_second_term_against_exact_average(self, u):
        """Test the real third-derivative term closes the gap and the imaginary printed one cannot.

        The average is real, so any purely imaginary second term leaves at least
        its own modulus in the residual.
        """
        from maasslab.core.bessel import kbes_average, kbes_main_terms
        from maasslab.models import TransformSpec

        spec = TransformSpec(T=20.0, alpha=0.2, precision_bits=128, node_budget=12)
        x = u * spec.T / math.pi
        with mp.workprec(128):
            lhs, _, _ = kbes_average(spec, x)
            first, second, printed = kbes_main_terms(spec, x)
            derived_gap = abs(lhs - first - second)
            printed_gap = abs(lhs - first - printed)
            assert printed.real == 0 and printed.imag != 0
            assert derived_gap < 0.25 * abs(second)
            assert printed_gap >= abs(printed)
            assert printed_gap > 10 * derived_gap

    def test_kbes_outside_support(self):
        """Test pi x / T = 3 T^alpha leaves only the error budget."""
        from maasslab.core.bessel import kbes_average
        from maasslab.models import TransformSpec

        spec = TransformSpec(T=20.0, alpha=0.2, precision_bits=128, node_budget=4)
        x = 3 * spec.T ** (1 + spec.alpha) / math.pi
        lhs, main, _ = kbes_average(spec, x)
        assert main == 0
        assert abs(lhs) <= 1e-6 * spec.T

    def test_kbes_convergence(self):
        from maasslab.core.bessel import transform_convergence_audit
        from maasslab.models import TransformSpec

        spec = TransformSpec(T=20.0, alpha=0.2, precision_bits=128, node_budget=12)
        report = transform_convergence_audit(spec, spec.T / math.pi, "kbes")
        assert report.passed, report

    def test_nonpositive_x(self):
        from maasslab.core.bessel import jbes_average, kbes_average
        from maasslab.errors import DomainError
        from maasslab.models import TransformSpec

        spec = TransformSpec(T=10.0, alpha=0.2)
        with pytest.raises(DomainError):
            jbes_average(spec, 0.0)
        with pytest.raises(DomainError):
            kbes_average(spec, -1.0)

    def test_csv(self, tmp_path):
        import csv

        from maasslab.core.bessel import CSV_HEADER, write_bessel_csv
        from maasslab.models import VerificationReport

        inputs = {"T": 20, "x": 6.5, "alpha": 0.2}
        report = VerificationReport.build("bessel.kbes", "bessel", inputs, 1, 1, 0, 1)
        path = write_bessel_csv([report], tmp_path / "bessel.csv")
        rows = list(csv.reader(path.open()))
        assert rows[0] == CSV_HEADER
        assert rows[1][-1] == "true"
