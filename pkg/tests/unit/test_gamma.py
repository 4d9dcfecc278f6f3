"""Unit tests for the gamma module."""

import numpy as np
import pytest
from mpmath import mp


@pytest.mark.unit
class TestLnGamma:
    """Tests for ln_gamma and its identities."""

    def test_trivial_values(self):
        """Test Gamma(1) = 1 and Gamma(1/2) = sqrt(pi)."""
        from maasslab.core.gamma import ln_gamma

        with mp.workprec(128):
            assert abs(ln_gamma(1, 128).value) < mp.mpf(2) ** -120
            assert abs(ln_gamma(0.5, 128).value - mp.log(mp.pi) / 2) < mp.mpf(2) ** -120

    def test_half_line_modulus(self):
        """Test |Gamma(1/2 + 5i)|^2 = pi / cosh(5 pi)."""
        from maasslab.core.gamma import ln_gamma

        with mp.workprec(128):
            value = ln_gamma(mp.mpc(0.5, 5), 128).value
            expected = mp.log(mp.pi / mp.cosh(5 * mp.pi))
            assert abs(2 * value.real - expected) < mp.mpf(2) ** -115

    @pytest.mark.parametrize(
        "z",
        [
            complex(0.3, 0.1),
            complex(2, 3),
            complex(-4.5, 0.7),
            complex(0.25, -40),
            complex(50, 300),
            complex(-30.5, -2),
        ],
    )
    def test_matches_mpmath_principal_branch(self, z):
        """Test agreement with mpmath.loggamma, imaginary part included."""
        from maasslab.core.gamma import ln_gamma

        ours = ln_gamma(z, 128).value
        with mp.workprec(200):
            oracle = mp.loggamma(mp.mpc(z))
            assert abs(ours - oracle) < mp.mpf(2) ** -112 * max(1, abs(oracle))

    def test_conjugate_symmetry(self):
        """Test ln_gamma(conj z) = conj(ln_gamma(z)) to within a few units in the last place."""
        from maasslab.core.gamma import ln_gamma

        for z in [complex(0.5, 3), complex(7, -12), complex(-2.5, 0.5), complex(20, 100)]:
            a = ln_gamma(z, 128).value
            b = ln_gamma(z.conjugate(), 128).value
            with mp.workprec(128):
                assert abs(b - mp.conj(a)) <= mp.mpf(2) ** -112 * max(1, abs(a))

    def test_recurrence_on_random_strip(self):
        """Test Gamma(z+1) = z Gamma(z) for 1000 seeded points in the strip."""
        from maasslab.core.gamma import ln_gamma_mp

        rng = np.random.default_rng(20240601)
        xs = rng.uniform(0, 10, 1000)
        ys = rng.uniform(-100, 100, 1000)
        with mp.workprec(128):
            worst = mp.mpf(0)
            for x, y in zip(xs, ys):
                z = mp.mpc(x, y)
                diff = ln_gamma_mp(z + 1) - ln_gamma_mp(z) - mp.log(z)
                worst = max(worst, abs(mp.expj(diff.imag) * mp.exp(diff.real) - 1))
            assert worst < mp.mpf(2) ** -100

    def test_pole_raises(self):
        """Test PoleError at nonpositive integers."""
        from maasslab.core.gamma import ln_gamma
        from maasslab.errors import PoleError

        for z in (0, -1, -7):
            with pytest.raises(PoleError):
                ln_gamma(z, 128)

    def test_precision_ceiling(self):
        """Test PrecisionExhaustedError above the configured ceiling."""
        from maasslab.core.gamma import ln_gamma
        from maasslab.errors import PrecisionExhaustedError

        with pytest.raises(PrecisionExhaustedError) as info:
            ln_gamma(2, 100000)
        assert info.value.required_bits == 100000

    def test_precision_carried(self):
        """Test the result records the input precision."""
        from maasslab.core.gamma import ln_gamma
        from maasslab.models import ComplexAP

        z = ComplexAP.of(complex(1.5, 2), 256)
        assert ln_gamma(z).precision_bits == 256


@pytest.mark.unit
class TestGammaR:
    """Tests for the completed factor."""

    @pytest.mark.parametrize("s,expected", [(1, 1), (2, "1/pi"), (4, "1/pi^2")])
    def test_trivial_values(self, s, expected):
        """Test Gamma_R at s = 1, 2, 4."""
        from maasslab.core.gamma import gamma_R

        with mp.workprec(128):
            target = {1: mp.mpf(1), "1/pi": 1 / mp.pi, "1/pi^2": 1 / mp.pi**2}[expected]
            assert abs(gamma_R(s, 128).value - target) < mp.mpf(2) ** -118

    def test_pole(self):
        """Test Gamma_R has a pole at s = -2."""
        from maasslab.core.gamma import gamma_R
        from maasslab.errors import PoleError

        with pytest.raises(PoleError):
            gamma_R(-2, 128)

    def test_array_path_matches(self):
        """Test the complex128 bulk path against the mp path."""
        from maasslab.core.gamma import ln_gamma_array, ln_gamma_mp

        z = np.array([0.05 + 1j, 0.5 - 200j, 3.0 + 0.1j, -4.7 + 30j, 0.55 + 2j])
        ours = ln_gamma_array(z)
        with mp.workprec(128):
            for value, point in zip(ours, z):
                exact = complex(ln_gamma_mp(mp.mpc(point)))
                assert abs(value - exact) < 1e-11 * max(1.0, abs(exact))


@pytest.mark.unit
class TestStirlingEnvelope:
    """Tests for the first-order Stirling approximation."""

    SIGMAS = np.linspace(0.25, 3.0, 8)
    GAMMAS = [
        0, 0.5, 1, 2, 3, 5, 7.5, 10, 15, 20, 25, 30, 40,
        50, 60, 80, 100, 120, 160, 200, 250, 320, 400, 500, 640,
    ]

    def test_degenerate_gamma_zero(self):
        """Test the gamma = 0 case has a finite main term and envelope C."""
        from maasslab.core.gamma import stirling_envelope

        approx = stirling_envelope(0.5, 0.0)
        with mp.workprec(128):
            assert abs(approx.main_term.value - mp.sqrt(2 * mp.pi)) < 1e-30
        assert approx.relative_error_bound == pytest.approx(10.0)

    def test_sigma_two_gamma_hundred(self):
        """Test the bound at (2, 100)."""
        from maasslab.core.gamma import stirling_envelope, stirling_relative_error

        approx = stirling_envelope(2, 100)
        assert stirling_relative_error(2, 100) <= approx.relative_error_bound

    def test_envelope_holds_on_grid(self):
        """Test the 200-point grid never exceeds C/(1+|gamma|)."""
        from maasslab.core.gamma import stirling_relative_error

        for sigma in self.SIGMAS:
            for g in self.GAMMAS:
                assert stirling_relative_error(sigma, g) <= 10 / (1 + g), (sigma, g)

    def test_error_halves_with_doubling(self):
        """Test the error ratio between gamma and 2 gamma lies in [0.4, 0.6]."""
        from maasslab.core.gamma import stirling_relative_error

        grid = set(self.GAMMAS)
        for sigma in self.SIGMAS:
            for g in self.GAMMAS:
                if g >= 20 and 2 * g in grid:
                    doubled = stirling_relative_error(sigma, 2 * g)
                    ratio = doubled / stirling_relative_error(sigma, g)
                    assert 0.4 <= ratio <= 0.6, (sigma, g, ratio)

    def test_sigma_two_halving(self):
        """Test sigma = 2 errors halve within a factor 1.5 along 10, 20, 40, 80."""
        from maasslab.core.gamma import stirling_relative_error

        errors = [stirling_relative_error(2, g) for g in (10, 20, 40, 80)]
        for a, b in zip(errors, errors[1:]):
            assert 0.5 / 1.5 <= b / a <= 0.5 * 1.5

    def test_rejects_nonpositive_sigma(self):
        """Test DomainError for sigma <= 0."""
        from maasslab.core.gamma import stirling_envelope
        from maasslab.errors import DomainError

        with pytest.raises(DomainError):
            stirling_envelope(0, 5)


@pytest.mark.unit
class TestReflection:
    """Tests for |Gamma(1/2 + i g)|^2 cosh(pi g) = pi."""

    def test_reflection_grid(self):
        """Test the acceptance grid at 128 bits."""
        from maasslab.core.gamma import reflection_defect

        for g in (0.1, 1, 5, 10, 50, 100):
            assert reflection_defect(g, 128) <= 1e-20


@pytest.mark.unit
class TestKBesselMellin:
    """Tests for the Mellin transform of K_{iT}^2."""

    def test_rhs_at_T_zero(self):
        """Test the T = 0 rhs reduces to 2^(s-3) Gamma(s/2)^4 / Gamma(s)."""
        from maasslab.core.gamma import kbessel_mellin_rhs

        with mp.workprec(128):
            s = mp.mpf(2)
            expected = mp.mpf(2) ** (s - 3) * mp.gamma(s / 2) ** 4 / mp.gamma(s)
            assert abs(kbessel_mellin_rhs(s, 0) - expected) < 1e-30

    def test_rejects_left_half_plane(self):
        """Test DomainError for Re s <= 0."""
        from maasslab.core.gamma import kbessel_mellin_identity
        from maasslab.errors import DomainError

        with pytest.raises(DomainError):
            kbessel_mellin_identity(-1, 1.0)

    @pytest.mark.slow
    @pytest.mark.parametrize("s,T", [(2, 1.0), (complex(0.5, 3), 5.0), (3, 10.0), (2, 0.0)])
    def test_identity(self, s, T):
        """Test lhs and rhs agree to 1e-10 relative."""
        from maasslab.core.gamma import kbessel_mellin_identity

        lhs, rhs = kbessel_mellin_identity(s, T, 128)
        assert abs(lhs.value - rhs.value) <= 1e-10 * abs(rhs.value)

    @pytest.mark.slow
    def test_independent_tanh_sinh_oracle(self):
        """Test the lhs against tanh-sinh quadrature of mpmath.besselk."""
        from maasslab.core.gamma import kbessel_mellin_identity

        lhs, _ = kbessel_mellin_identity(2, 1.0, 128)
        with mp.workprec(128):
            oracle = mp.quad(lambda y: y * mp.besselk(1j, y) ** 2, [0, 1, 10, mp.inf])
            assert abs(lhs.value - oracle) <= 1e-12 * abs(oracle)
