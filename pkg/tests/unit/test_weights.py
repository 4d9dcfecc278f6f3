"""Unit tests for the harmonic weights H, W and the profile H0."""

import csv
import math

import numpy as np
import pytest


@pytest.mark.unit
class TestCutoff:
    """Tests for q(t, T)."""

    @pytest.mark.parametrize(
        "t, T, expected", [(0, 10, 0.0), (30, 10, 10.0), (-30, 10, 10.0), (20, 10, 0.0)]
    )
    def test_values(self, t, T, expected):
        from maasslab.core.weights import cutoff_q

        assert cutoff_q(t, T) == expected

    def test_nonpositive_T(self):
        from maasslab.core.weights import cutoff_q
        from maasslab.errors import DomainError

        with pytest.raises(DomainError):
            cutoff_q(1.0, 0.0)


@pytest.mark.unit
class TestWeightH:
    """Tests for the Watson weight H(t)."""

    def test_even_exactly(self):
        """Test H(-t) == H(t) bit for bit on a 100-point grid."""
        from maasslab.core.weights import ln_weight_H

        for t in np.linspace(0.5, 140, 100):
            assert ln_weight_H(float(t), 50.0) == ln_weight_H(float(-t), 50.0)

    def test_positive(self):
        from maasslab.core.weights import weight_H_exact

        for t in [0.1, 10.0, 50.0, 99.0, 100.0, 130.0]:
            assert weight_H_exact(t, 50.0) > 0

    def test_stirling_main_term(self):
        """Test T = 50, t = 50 against the Stirling main term within its envelope."""
        from maasslab.core.weights import stirling_H_envelope, weight_H_asymptotic, weight_H_exact

        exact = weight_H_exact(50.0, 50.0)
        asym = weight_H_asymptotic(50.0, 50.0)
        assert abs(asym - exact) / exact <= stirling_H_envelope(50.0, 50.0)

    def test_exponential_decay_past_transition(self):
        """Test H(120)/H(100) at T = 50 is exp(-20 pi) up to a factor 100."""
        from mpmath import mp

        from maasslab.core.weights import cutoff_q, ln_weight_H

        assert cutoff_q(120.0, 50.0) == 20.0
        log_ratio = ln_weight_H(120.0, 50.0) - ln_weight_H(100.0, 50.0)
        assert abs(log_ratio + 20 * mp.pi) <= math.log(100)

    def test_underflow_returns_bound(self):
        """Test that a deep-tail evaluation is flagged and bounded."""
        from maasslab.core.weights import UNDERFLOW_LN, ln_weight_H, weight_H_eval

        value, underflow = weight_H_eval(400.0, 10.0)
        assert underflow
        assert ln_weight_H(400.0, 10.0) < math.log(value)
        assert value == math.exp(UNDERFLOW_LN)

    def test_decay_audit(self):
        """Test H e^(pi q) stays within a factor 100 of H(2T) beyond 2T + 10 ln T."""
        from maasslab.core.weights import decay_audit

        audit = decay_audit(50.0)
        assert audit.ok, audit


@pytest.mark.unit
class TestWeightW:
    """Tests for the smooth restriction W(t)."""

    def test_zeros(self):
        from maasslab.core.weights import weight_W
        from maasslab.models import WeightParams

        p = WeightParams.scaled(T=100.0, alpha=0.2)
        assert weight_W(0.0, p) == 0.0
        assert weight_W(200.0, p) == 0.0
        assert weight_W(-200.0, p) == 0.0

    def test_even_and_bounded(self):
        from maasslab.core.weights import weight_W
        from maasslab.models import WeightParams

        p = WeightParams.scaled(T=100.0, alpha=0.2)
        for t in np.linspace(0, 260, 131):
            w = weight_W(float(t), p)
            assert 0.0 <= w <= 1.0
            assert w == weight_W(float(-t), p)

    def test_plateau_in_regime(self):
        """Test |W - 1| <= T^-100 on the plateau when the margin reaches 100 ln T."""
        from maasslab.core.weights import plateau_defect, plateau_regime_ok
        from maasslab.models import WeightParams

        p = WeightParams.scaled(T=1e4, alpha=0.8)
        assert plateau_regime_ok(p)
        assert plateau_defect(p) <= 1e4**-100

    def test_plateau_out_of_regime_flagged(self):
        from maasslab.core.weights import plateau_regime_ok
        from maasslab.models import WeightParams

        assert not plateau_regime_ok(WeightParams.scaled(T=200.0, alpha=0.2))

    def test_odd_degree_rejected(self):
        from pydantic import ValidationError

        from maasslab.models import WeightParams

        with pytest.raises(ValidationError):
            WeightParams(T=10.0, alpha=0.1, smoothing_degree=5)


@pytest.mark.unit
class TestProfileH0:
    """Tests for the rescaled profile H0."""

    def test_leading_term_at_half(self):
        from maasslab.core.weights import profile_H0, profile_H0_leading

        value = profile_H0(0.5, 200.0)
        leading = profile_H0_leading(0.5)
        assert abs(value - leading) / leading <= 0.05

    def test_leading_constant_is_four_pi(self):
        """Test H0 tends to 4 pi/(x (1 - x^2)^(1/2)), half the 8 pi of the unscaled weight."""
        from maasslab.core.weights import profile_H0, profile_H0_leading

        x = 0.5
        expected = 4 * math.pi / (x * math.sqrt(1 - x * x))
        assert profile_H0_leading(x) == pytest.approx(expected, rel=1e-14)
        assert abs(profile_H0(x, 200.0) - 2 * expected) > 0.4 * expected

    def test_domain(self):
        from maasslab.core.weights import profile_H0
        from maasslab.errors import DomainError

        for x in (0.0, 1.0, -0.2, 1.5):
            with pytest.raises(DomainError):
                profile_H0(x, 200.0)

    def test_profile_derivative_budget(self):
        """Test |H0'(x)| <= 100 T^alpha on T^-alpha <= x <= 1 - T^-alpha."""
        from maasslab.core.weights import profile_derivative_audit

        audit = profile_derivative_audit(200.0, 0.2, points=20)
        assert audit.ok, audit


@pytest.mark.unit
class TestDerivativeAudit:
    """Tests for the finite-difference derivative budgets."""

    @pytest.mark.parametrize("order", [1, 2])
    def test_H_within_budget(self, order):
        from maasslab.core.weights import derivative_audit
        from maasslab.models import WeightParams

        audit = derivative_audit(WeightParams.scaled(T=200.0, alpha=0.2), order, points=20)
        assert audit.ok, audit
        assert audit.regime_ok

    def test_HW_reports_regime(self):
        """Test the H W audit flags a smoothing degree too steep for T^alpha."""
        from maasslab.core.weights import derivative_audit
        from maasslab.models import WeightParams

        params = WeightParams.scaled(T=200.0, alpha=0.2)
        audit = derivative_audit(params, 1, points=10, include_W=True)
        assert audit.target == "HW"
        assert not audit.regime_ok

    def test_unsupported_order(self):
        from maasslab.core.weights import derivative_audit
        from maasslab.errors import DomainError
        from maasslab.models import WeightParams

        with pytest.raises(DomainError):
            derivative_audit(WeightParams.scaled(T=200.0, alpha=0.2), 3, points=4)


@pytest.mark.unit
class TestWeightSweep:
    """Tests for the sweep and its CSV output."""

    def test_sweep_csv(self, tmp_path):
        from maasslab.core.weights import weight_sweep, write_weight_csv
        from maasslab.models import WeightParams

        p = WeightParams.scaled(T=50.0, alpha=0.2)
        samples = weight_sweep([10.0, 50.0, 120.0], p)
        assert [s.q for s in samples] == [0.0, 0.0, 20.0]
        path = write_weight_csv(samples, tmp_path / "weights.csv")
        with path.open() as fh:
            rows = list(csv.reader(fh))
        assert rows[0] == ["t", "H_exact", "H_asym", "rel_err", "W", "q"]
        assert len(rows) == 4
        assert float(rows[2][0]) == 50.0
