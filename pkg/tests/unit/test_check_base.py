"""Unit tests for the check layer base classes."""

import pytest


def _make_check(name="dummy.check", group="dummy", outcome=None):
    """A concrete check whose run returns ``outcome`` or raises it."""
    from maasslab.core.check_base import Check, CheckCategory

    check_name, check_group = name, group

    class DummyCheck(Check):
        name = check_name
        group = check_group
        display_name = "Dummy"
        category = CheckCategory.EXACT

        def run(self, config, budgets, progress_callback=None):
            self.report_progress(100, "done", progress_callback)
            if isinstance(outcome, Exception):
                raise outcome
            return list(outcome or [])

    return DummyCheck()


def _report(residual, budget=1.0, regime_ok=True):
    from maasslab.models import VerificationReport

    return VerificationReport.build(
        check_id="dummy.check",
        module="test",
        inputs={},
        lhs=residual,
        rhs=0,
        residual=residual,
        budget=budget,
        regime_ok=regime_ok,
    )


@pytest.fixture
def budgets(tmp_path):
    from maasslab.core.budgets import BudgetBook

    return BudgetBook(budgets_file=tmp_path / "absent.yaml")


@pytest.fixture
def config():
    from maasslab.models import RunConfig

    return RunConfig(T_list=[100.0, 1000.0])


@pytest.mark.unit
class TestCheckExecute:
    """Test Check.execute status mapping."""

    def test_all_reports_pass(self, config, budgets):
        """Test PASSED when every report passes."""
        from maasslab.core.check_base import CheckStatus

        result = _make_check(outcome=[_report(0.5), _report(1.0)]).execute(config, budgets)
        assert result.status == CheckStatus.PASSED
        assert result.passed
        assert result.failed_reports == []

    def test_one_report_fails(self, config, budgets):
        """Test FAILED when any report exceeds its budget."""
        from maasslab.core.check_base import CheckStatus

        result = _make_check(outcome=[_report(0.5), _report(2.0)]).execute(config, budgets)
        assert result.status == CheckStatus.FAILED
        assert len(result.failed_reports) == 1

    def test_no_reports_fails(self, config, budgets):
        """Test an empty grid is not a pass."""
        from maasslab.core.check_base import CheckStatus

        result = _make_check(outcome=[]).execute(config, budgets)
        assert result.status == CheckStatus.FAILED

    def test_regime_flag_does_not_fail(self, config, budgets):
        """Test a report outside the regime still passes on its residual."""
        result = _make_check(outcome=[_report(0.1, regime_ok=False)]).execute(config, budgets)
        assert result.passed

    def test_numerical_error_becomes_error_result(self, config, budgets):
        """Test library errors are captured as ERROR with the message."""
        from maasslab.core.check_base import CheckStatus
        from maasslab.errors import QuadratureBudgetError

        error = QuadratureBudgetError("tail", estimate=1.0, budget=1e-3)
        result = _make_check(outcome=error).execute(config, budgets)
        assert result.status == CheckStatus.ERROR
        assert "tail" in result.error_message
        assert result.reports == []

    @pytest.mark.parametrize("error_name", ["ConfigError", "SpectrumParseError"])
    def test_input_errors_propagate(self, config, budgets, error_name):
        """Test configuration and data errors abort instead of becoming results."""
        from maasslab import errors

        error = (
            errors.SpectrumParseError("bad token", line_no=3)
            if error_name == "SpectrumParseError"
            else errors.ConfigError("bad key")
        )
        with pytest.raises(type(error)):
            _make_check(outcome=error).execute(config, budgets)

    def test_progress_callback(self, config, budgets):
        """Test progress reaches the callback."""
        calls = []
        _make_check(outcome=[_report(0)]).run(config, budgets, lambda p, m: calls.append((p, m)))
        assert calls == [(100, "done")]


@pytest.mark.unit
class TestSelectT:
    """Test T-grid selection."""

    def test_in_range(self, config):
        """Test entries inside the range are kept."""
        from maasslab.core.check_base import Check

        assert Check.select_T(config, 50, 500, (200.0,)) == [100.0]

    def test_fallback(self, config):
        """Test the fallback applies when no entry fits."""
        from maasslab.core.check_base import Check

        assert Check.select_T(config, 10, 40, (20.0, 40.0)) == [20.0, 40.0]


@pytest.mark.unit
class TestCheckRegistry:
    """Test CheckRegistry."""

    def test_register_and_lookup(self):
        """Test registration, lookup and grouping."""
        from maasslab.core.check_base import CheckCategory, CheckRegistry

        registry = CheckRegistry()
        registry.register(_make_check("a.one", group="g1"))
        registry.register(_make_check("b.two", group="g2"))
        registry.register(_make_check("a.three", group="g1"))

        assert registry.count() == 3
        assert registry.get("b.two").group == "g2"
        assert registry.get("missing") is None
        assert registry.groups() == ["g1", "g2"]
        assert [c.name for c in registry.list_by_group("g1")] == ["a.one", "a.three"]
        assert len(registry.list_by_category(CheckCategory.EXACT)) == 3

    def test_duplicate_rejected(self):
        """Test registering a name twice raises ValueError."""
        from maasslab.core.check_base import CheckRegistry

        registry = CheckRegistry()
        registry.register(_make_check("a.one"))
        with pytest.raises(ValueError, match="already registered"):
            registry.register(_make_check("a.one"))

    def test_global_registry_has_every_group(self):
        """Test the bundled checks cover every CLI subcommand."""
        from maasslab.cli import SUBCOMMANDS
        from maasslab.core.check_base import get_check_registry

        groups = get_check_registry().groups()
        assert sorted(groups) == sorted(s for s in SUBCOMMANDS if s != "run-all")

    def test_check_names_unique_and_dotted(self):
        """Test check names are module-prefixed."""
        from maasslab.core.check_base import get_check_registry

        names = [c.name for c in get_check_registry().list_all()]
        assert len(names) == len(set(names))
        assert all("." in n for n in names)
