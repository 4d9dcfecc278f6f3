"""Unit tests for the quadrature helpers."""

import math

import numpy as np
import pytest
from mpmath import mp


@pytest.mark.unit
class TestPanels:
    """Tests for panel breakpoints."""

    def test_geometric_panels_cover_interval(self):
        """Test geometric panels start at a, end at b and grow."""
        from maasslab.core.quadrature import geometric_panels

        points = geometric_panels(0, 50, ratio=1.5, first=0.5)
        widths = [float(b - a) for a, b in zip(points, points[1:])]
        assert points[0] == 0 and points[-1] == 50
        assert all(w > 0 for w in widths)
        assert widths[1] == pytest.approx(0.75)

    def test_geometric_panels_empty_interval(self):
        """Test b <= a is rejected."""
        from maasslab.core.quadrature import geometric_panels

        with pytest.raises(ValueError):
            geometric_panels(1, 1)

    def test_uniform_panels(self):
        """Test uniform breakpoints."""
        from maasslab.core.quadrature import uniform_panels

        points = uniform_panels(0, 1, 4)
        assert [float(p) for p in points] == [0.0, 0.25, 0.5, 0.75, 1.0]


@pytest.mark.unit
class TestIntegrate:
    """Tests for mpmath-backed integration."""

    def test_gaussian(self):
        """Test int_0^inf exp(-x^2) dx = sqrt(pi)/2."""
        from maasslab.core.quadrature import integrate

        with mp.workprec(128):
            result = integrate(lambda x: mp.exp(-x * x), [0, 1, 4, mp.inf])
            assert abs(result.value - mp.sqrt(mp.pi) / 2) < mp.mpf(10) ** -30

    def test_budget_exceeded(self):
        """Test a zero-width budget raises with the estimate attached."""
        from maasslab.core.quadrature import QuadResult
        from maasslab.errors import QuadratureBudgetError

        with pytest.raises(QuadratureBudgetError) as exc_info:
            QuadResult(mp.mpf(1), mp.mpf("1e-5")).check(1e-10, "tail")
        assert exc_info.value.estimate == pytest.approx(1e-5)
        assert "tail" in str(exc_info.value)

    def test_fixed_gl_polynomial(self):
        """Test 8-node panels integrate a degree-10 polynomial to double precision."""
        from maasslab.core.quadrature import fixed_gl, uniform_panels

        with mp.workprec(64):
            value = fixed_gl(lambda x: x**10, uniform_panels(0, 2, 4), 8)
        assert float(value) == pytest.approx(2**11 / 11, rel=1e-14)

    def test_gl_panel_nodes(self):
        """Test concatenated node weights sum to the interval length."""
        from maasslab.core.quadrature import gl_panel_nodes

        x, w = gl_panel_nodes([0.0, 1.0, 3.0], 6)
        assert x.shape == w.shape == (12,)
        assert np.sum(w) == pytest.approx(3.0)
        assert np.all((x > 0) & (x < 3))


@pytest.mark.unit
class TestVerticalLine:
    """Tests for the trapezoid rule on a vertical line."""

    def test_gaussian_moment(self):
        """Test (1/2 pi i) int e^(s^2) ds over Re s = 0 equals 1/(2 sqrt(pi))."""
        from maasslab.core.quadrature import vertical_line

        with mp.workprec(96):
            value = vertical_line(lambda s: mp.exp(s * s), 0, 12, 0.25)
            assert abs(value - 1 / (2 * mp.sqrt(mp.pi))) < mp.mpf(10) ** -20

    def test_symmetric_half(self):
        """Test the conjugate-symmetric shortcut agrees with the full sum."""
        from maasslab.core.quadrature import vertical_line

        def f(s):
            return mp.exp(s * s) / (s + 2)

        with mp.workprec(96):
            full = vertical_line(f, 0.5, 10, 0.2)
            half = vertical_line(f, 0.5, 10, 0.2, symmetric=True)
            assert abs(full - half) < mp.mpf(10) ** -20
        assert math.isfinite(float(half.real))
