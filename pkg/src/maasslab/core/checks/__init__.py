"""Bundled acceptance checks; importing this package registers them in CLI order."""

from maasslab.core.checks import (  # noqa: F401
    gamma_checks,
    weights_checks,
    afe_checks,
    bessel_checks,
    kuznetsov_checks,
    voronoi_checks,
    diagonal_checks,
    offdiag_checks,
)
