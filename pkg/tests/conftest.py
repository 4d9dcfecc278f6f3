"""Shared pytest fixtures and configuration."""

import sys
from pathlib import Path

import pytest

# Add src to path for imports
root_dir = Path(__file__).parent.parent
sys.path.insert(0, str(root_dir / "src"))
sys.path.insert(0, str(root_dir))


@pytest.fixture(scope="session")
def level_one_spectrum():
    """The bundled complete level-1 window (no forms below t_max = 9.5)."""
    from config.settings import settings
    from maasslab.core.spectra import load_spectrum

    return load_spectrum(settings.spectrum_path)


@pytest.fixture(scope="session")
def wide_empty_spectrum():
    """A synthetic complete window with no forms, wide enough for strongly damped h."""
    from maasslab.core.spectra import parse_spectrum

    return parse_spectrum("level=1\nt_max=30\ncomplete=1\n")


@pytest.fixture
def reports_dir(tmp_path):
    """Scratch directory for written reports."""
    path = tmp_path / "reports"
    path.mkdir()
    return path


@pytest.fixture(autouse=True)
def restore_working_precision():
    """Reset mpmath's global precision after each test."""
    from mpmath import mp

    prec = mp.prec
    yield
    mp.prec = prec
