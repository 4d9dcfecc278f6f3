"""Unit tests for the GL(3) Voronoi kernels, Psi+- and the c = 1 identity."""

import math

import pytest
from mpmath import mp


def _spec(sign="+", u=0.0, z=0.5):
    from maasslab.models import PsiPmSpec

    return PsiPmSpec(y=0.2, z=z, u=u, sign=sign, N=100.0, M=1e6, T=100.0)


@pytest.fixture(scope="module")
def eisenstein_table():
    from maasslab.core.arith import eisenstein_sym2_coefficients

    return eisenstein_sym2_coefficients(9.5, 1000)


@pytest.mark.unit
class TestGammaQuotients:
    """Tests for Q(s, a) and G+-(s)."""

    @pytest.mark.parametrize("a", [0, 1])
    def test_unit_modulus_on_critical_line(self, a):
        from maasslab.core.voronoi import gamma_quotient_mp

        with mp.workprec(128):
            assert abs(abs(gamma_quotient_mp(mp.mpc(0.5, 3), 10, a)) - 1) < 1e-25

    @pytest.mark.parametrize("s", [complex(0.05, 0.5), complex(0.5, 7), complex(0.3, -25)])
    def test_array_matches_mp(self, s):
        import numpy as np

        from maasslab.core.voronoi import gamma_quotient_array, gamma_quotient_mp

        for a in (0, 1):
            ours = gamma_quotient_array(np.array([s]), 9.5, a)[0]
            with mp.workprec(128):
                exact = complex(gamma_quotient_mp(s, 9.5, a))
            assert abs(ours - exact) <= 1e-10 * abs(exact)

    def test_pole_at_zero(self):
        from maasslab.core.voronoi import voronoi_kernel
        from maasslab.errors import PoleError

        with pytest.raises(PoleError):
            voronoi_kernel(0, 10.0)

    def test_conjugation_swaps_signs(self):
        from maasslab.core.voronoi import conjugate_symmetry_defect

        assert conjugate_symmetry_defect(complex(0.3, 0.7), 20.0) < 1e-25

    def test_kernel_point(self):
        from maasslab.core.voronoi import kernel_point, voronoi_kernel

        point = kernel_point(complex(0.05, 1.0), 50.0)
        plus, minus = voronoi_kernel(complex(0.05, 1.0), 50.0)
        assert point.T == 50.0
        assert point.plus_value.value == plus.value
        assert point.minus_value.value == minus.value


@pytest.mark.unit
class TestKernelAudits:
    """Tests for the kernel bound and the Stirling forms."""

    @pytest.mark.parametrize("T", [50.0, 100.0, 200.0])
    def test_kernel_bound(self, T):
        from maasslab.core.voronoi import kernel_bound_audit

        report = kernel_bound_audit(T)
        assert report.passed
        assert report.check_id == "voronoi.kernel_bound"

    @pytest.mark.parametrize("T", [50.0, 200.0])
    def test_flat_bound_misses_by_T_power(self, T):
        """Test the peak scales as T^(-0.9), so C = 100 fails C T^(-0.95) and is flagged."""
        from maasslab.core.voronoi import kernel_bound_audit

        report = kernel_bound_audit(T)
        assert 98.0 < float(report.lhs) * T**0.9 < 100.0
        assert float(report.lhs) > 100.0 * T**-0.95
        assert report.passed
        assert not report.regime_ok

    def test_flat_bound_holds_with_doubled_constant(self):
        """Test C = 200 covers the flat bound at T = 50."""
        from maasslab.core.voronoi import kernel_bound_audit

        report = kernel_bound_audit(50.0, constant=200.0)
        assert float(report.lhs) <= 200.0 * 50.0**-0.95
        assert report.regime_ok

    @pytest.mark.parametrize("T", [50.0, 100.0, 200.0])
    def test_stirling_form(self, T):
        from maasslab.core.voronoi import stirling_form_audit

        assert stirling_form_audit(T).passed

    def test_stirling_residual_shrinks_with_T(self):
        from maasslab.core.voronoi import stirling_form_residual

        s = complex(0.05, 1.0)
        assert stirling_form_residual(s, 200.0) < 0.6 * stirling_form_residual(s, 50.0)

    @pytest.mark.parametrize("T", [50.0, 100.0, 200.0])
    def test_both_quotients_share_the_T_power(self, T):
        """Test T times the residual stays bounded, so neither form is off by a power of T."""
        from maasslab.core.voronoi import stirling_form_residual

        for s in (complex(0.05, 1.0), complex(0.05, -2.0), complex(0.3, 0.0)):
            assert T * stirling_form_residual(s, T) < 10.0

    def test_odd_quotient_against_direct_ratio(self):
        """Test Q(s, 1)/Q(s, 0) tends to Gamma_R(1+s) Gamma_R(1-s) / (Gamma_R(s) Gamma_R(2-s))."""
        from maasslab.core.voronoi import gamma_quotient_mp

        def gamma_r(z):
            return mp.power(mp.pi, -z / 2) * mp.gamma(z / 2)

        with mp.workprec(128):
            s = mp.mpc(0.05, 1.0)
            expected = gamma_r(1 + s) * gamma_r(1 - s) / (gamma_r(s) * gamma_r(2 - s))
            for T in (100, 400):
                ratio = gamma_quotient_mp(s, T, 1) / gamma_quotient_mp(s, T, 0)
                assert abs(ratio / expected - 1) < 20 / T


@pytest.mark.unit
class TestMellin:
    """Tests for Mellin transforms of compact bumps."""

    def test_value_at_one_is_mass(self):
        from maasslab.core.voronoi import DEFAULT_BUMP, mellin

        with mp.workprec(128):
            mass = mp.quad(DEFAULT_BUMP, [1, mp.sqrt(2), 2])
            assert float(mellin(DEFAULT_BUMP, 1).re) == pytest.approx(float(mass), rel=1e-12)

    def test_dilation(self):
        """Test psi(x/lambda) has transform lambda^s psi~(s)."""
        from maasslab.core.bessel import LogBumpH
        from maasslab.core.voronoi import mellin

        psi = LogBumpH(1.5, 0.4)
        stretched = LogBumpH(3.0, 0.4)
        s = mp.mpc(0.7, 2)
        with mp.workprec(128):
            expected = mp.power(2, s) * mellin(psi, s).value
            assert abs(mellin(stretched, s).value - expected) <= 1e-12 * abs(expected)

    def test_support_must_avoid_zero(self):
        from maasslab.core.voronoi import mellin
        from maasslab.errors import DomainError

        with pytest.raises(DomainError):
            mellin(lambda x: 1, 1, support=(0.0, 1.0))

    def test_parts_bound_holds(self):
        from maasslab.core.voronoi import DEFAULT_BUMP, EPS, mellin, mellin_parts_constant

        gamma = 40.0
        value = abs(mellin(DEFAULT_BUMP, mp.mpc(1 - EPS, -gamma)).value)
        assert value <= mellin_parts_constant(DEFAULT_BUMP, EPS, 3) / gamma**3

    def test_decay_audit(self):
        from maasslab.core.voronoi import mellin_decay_audit

        report = mellin_decay_audit()
        assert report.passed
        assert "decay factor" in report.notes


@pytest.mark.unit
class TestTruncation:
    """Tests for the dual-sum cutoff."""

    def test_square_modulus(self):
        from maasslab.core.voronoi import voronoi_truncation

        assert voronoi_truncation(1, 1, 1, 100.0**2, 100.0) == 1

    def test_cubic_in_c(self):
        from maasslab.core.voronoi import voronoi_truncation

        single = voronoi_truncation(1, 1, 1, 100.0, 100.0)
        double = voronoi_truncation(2, 1, 1, 100.0, 100.0)
        assert double == pytest.approx(8 * single, rel=0.02)

    def test_fully_negligible(self):
        from maasslab.core.voronoi import voronoi_truncation

        assert voronoi_truncation(1, 1, 1, 1e6, 100.0) == 0

    def test_bad_inputs(self):
        from maasslab.core.voronoi import voronoi_truncation
        from maasslab.errors import DomainError

        with pytest.raises(DomainError):
            voronoi_truncation(0, 1, 1, 10.0, 100.0)
        with pytest.raises(DomainError):
            voronoi_truncation(1, 1, 1, -1.0, 100.0)


@pytest.mark.unit
class TestVectorisedProfiles:
    """Tests that the numpy window and AFE factors agree with their scalar versions."""

    def test_window_matches_weight(self):
        from maasslab.core.voronoi import kernel_weight_check

        assert kernel_weight_check(100.0, 0.2, [0.05, 0.5, 1.0, 1.5, 1.9, 1.99]) < 1e-12

    def test_afe_factor_matches(self):
        from maasslab.core.voronoi import afe_profile_check

        assert afe_profile_check([0.1, 0.5, 1.0, 3.0, 20.0]) < 1e-13

    def test_profile_vanishes_outside_window(self):
        import numpy as np

        from maasslab.core.voronoi import psi_profile
        from maasslab.models import PsiPmSpec

        # tau = 2 pi y sqrt(xi x) >= 2 everywhere on (1, 2)^2
        spec = PsiPmSpec(y=0.35, z=0.5, N=100.0, M=1e6, T=100.0)
        assert np.all(psi_profile(spec, np.array([1.2, 1.5, 1.9])) == 0)


@pytest.mark.unit
class TestPsiPm:
    """Tests for the Psi+- contour integral."""

    def test_contour_left_of_poles_rejected(self):
        from maasslab.core.voronoi import psi_pm
        from maasslab.errors import DomainError

        with pytest.raises(DomainError):
            psi_pm(_spec(), sigma=0.0)

    def test_range_enforced(self):
        from pydantic import ValidationError

        with pytest.raises(ValidationError):
            _spec(z=5.0)

    @pytest.mark.slow
    @pytest.mark.parametrize("sign", ["+", "-"])
    def test_bound(self, sign):
        from maasslab.core.voronoi import psi_bound_report

        report = psi_bound_report(_spec(sign))
        assert report.passed
        assert float(report.lhs) > 0

    @pytest.mark.slow
    def test_contour_shift(self):
        from maasslab.core.voronoi import contour_shift_report

        assert contour_shift_report(_spec()).passed

    @pytest.mark.slow
    def test_decay_and_u_scaling(self):
        from maasslab.core.voronoi import psi_decay_report, psi_u_scaling_report

        decay = psi_decay_report(_spec())
        assert decay.passed
        assert decay.check_id == "voronoi.psi_decay.plus"
        scaling = psi_u_scaling_report(_spec(u=0.2))
        assert scaling.passed
        assert "ratio" in scaling.notes


@pytest.mark.unit
class TestIdentitySmoke:
    """Tests for the c = 1 Voronoi identity on Eisenstein lifts."""

    def test_short_table(self):
        from maasslab.core.arith import eisenstein_sym2_coefficients
        from maasslab.core.voronoi import voronoi_identity_smoke
        from maasslab.errors import InsufficientDataError

        with pytest.raises(InsufficientDataError):
            voronoi_identity_smoke(eisenstein_sym2_coefficients(9.5, 30), 9.5, 20.0)

    def test_mismatched_lift(self, eisenstein_table):
        from maasslab.core.voronoi import voronoi_identity_smoke
        from maasslab.errors import DomainError

        with pytest.raises(DomainError):
            voronoi_identity_smoke(eisenstein_table, 10.0, 20.0)

    def test_polar_terms_need_nonzero_t(self):
        from maasslab.core.voronoi import SMOKE_BUMP, polar_terms
        from maasslab.errors import DomainError

        with pytest.raises(DomainError):
            polar_terms(SMOKE_BUMP, 0.0, 20.0)

    @pytest.mark.slow
    def test_identity_at_m_twenty(self, eisenstein_table):
        from maasslab.core.voronoi import voronoi_identity_smoke

        report = voronoi_identity_smoke(eisenstein_table, 9.5, 20.0)
        assert report.check_id == "voronoi.identity.c1"
        assert report.passed

    @pytest.mark.slow
    def test_empty_left_side(self):
        """Test a window holding no integer leaves only the dual side, which must vanish."""
        from maasslab.core.arith import eisenstein_sym2_coefficients
        from maasslab.core.voronoi import voronoi_identity_smoke

        M = 0.3
        assert math.e * M < 1
        report = voronoi_identity_smoke(eisenstein_sym2_coefficients(9.5, 8000), 9.5, M)
        assert float(report.lhs) == 0.0
        assert report.passed

    @pytest.mark.slow
    def test_truncation_audit(self, eisenstein_table):
        """Test the audit reports against its fixed tolerance at the desk-scale cutoff."""
        from maasslab.core.voronoi import voronoi_truncation_audit

        report = voronoi_truncation_audit(eisenstein_table, 9.5, 20.0)
        assert report.inputs["k_cut"] == "5"
        assert float(report.budget) == 1e-6
        assert report.passed == (float(report.residual) <= 1e-6)

    @pytest.mark.slow
    def test_truncation_audit_fails_on_inflated_tail(self, eisenstein_table):
        """Test coefficients inflated past the cutoff make the audit fail."""
        from maasslab.core.voronoi import voronoi_truncation_audit
        from maasslab.models import CoefficientTable

        inflated = CoefficientTable(
            source_form_id="inflated",
            A1=tuple(a * 1e9 if n > 5 else a for n, a in enumerate(eisenstein_table.A1, 1)),
            eisenstein_t=9.5,
        )
        report = voronoi_truncation_audit(inflated, 9.5, 20.0)
        assert float(report.budget) == 1e-6
        assert float(report.residual) > 1.0
        assert not report.regime_ok
        assert not report.passed
