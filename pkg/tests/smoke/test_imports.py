"""Smoke tests for module imports."""

import pytest


@pytest.mark.smoke
class TestCoreImports:
    """Test that core modules can be imported."""

    @pytest.mark.parametrize(
        "module",
        [
            "maasslab.core.gamma",
            "maasslab.core.quadrature",
            "maasslab.core.weights",
            "maasslab.core.lfun",
            "maasslab.core.bessel",
            "maasslab.core.arith",
            "maasslab.core.spectra",
            "maasslab.core.kuznetsov",
            "maasslab.core.voronoi",
            "maasslab.core.experiments",
            "maasslab.core.budgets",
            "maasslab.core.report_writer",
        ],
    )
    def test_import_core_module(self, module):
        """Test each numerical module imports."""
        import importlib

        assert importlib.import_module(module) is not None

    def test_import_check_base(self):
        """Test Check and registry import."""
        from maasslab.core.check_base import Check, CheckRegistry, get_check_registry

        assert Check is not None
        assert CheckRegistry is not None
        assert get_check_registry().count() > 0


@pytest.mark.smoke
class TestModelImports:
    """Test that models can be imported."""

    def test_import_models(self):
        """Test the public model names."""
        import maasslab.models as models

        for name in models.__all__:
            assert getattr(models, name) is not None


@pytest.mark.smoke
class TestUtilityImports:
    """Test that utilities and configuration can be imported."""

    def test_import_logger(self):
        """Test logger import."""
        from maasslab.utils.logger import get_logger, setup_logger

        assert get_logger("maasslab.test").name == "maasslab.test"
        assert setup_logger is not None

    def test_import_settings(self):
        """Test settings import and bundled paths."""
        from config.settings import settings

        assert settings.spectrum_path.exists()
        assert settings.budgets_path.exists()
        assert settings.run_config_path.exists()

    def test_import_errors(self):
        """Test every error derives from MaassLabError."""
        from maasslab import errors

        for name in (
            "PoleError",
            "PrecisionExhaustedError",
            "QuadratureBudgetError",
            "DomainError",
            "InsufficientDataError",
            "TableExhaustedError",
            "SpectrumParseError",
            "SpectrumValidationError",
            "IncompleteSpectrumError",
            "UnsupportedLevelError",
            "ConfigError",
        ):
            assert issubclass(getattr(errors, name), errors.MaassLabError)

    def test_import_cli(self):
        """Test the CLI entry point imports."""
        from maasslab.cli import main

        assert callable(main)


@pytest.mark.smoke
def test_version():
    """Test version is defined."""
    import maasslab

    assert hasattr(maasslab, "__version__")
    assert isinstance(maasslab.__version__, str)
