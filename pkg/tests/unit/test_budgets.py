"""Unit tests for BudgetBook."""

import pytest


@pytest.mark.unit
class TestBudgetBook:
    """Test budget loading and overrides."""

    def test_shipped_file(self):
        """Test the shipped budgets file loads."""
        from maasslab.core.budgets import BudgetBook

        book = BudgetBook()
        assert book.budget("afe.zeta", 1.0) == pytest.approx(1e-8)
        assert book.constant("stirling", 0.0) == pytest.approx(10.0)

    def test_default_when_unknown(self):
        """Test unknown ids fall back to the caller's default."""
        from maasslab.core.budgets import BudgetBook

        book = BudgetBook()
        assert book.budget("no.such.check", 0.25) == 0.25
        assert book.constant("no_such_constant", 3.0) == 3.0

    def test_missing_file_uses_defaults(self, tmp_path):
        """Test built-in defaults when the file is absent."""
        from maasslab.core.budgets import BudgetBook

        book = BudgetBook(budgets_file=tmp_path / "missing.yaml")
        assert book.budget("gamma.reflection", 1.0) == pytest.approx(1e-20)
        assert book.constant("j0", 0.0) == 1.0

    def test_overrides_win(self, tmp_path):
        """Test run-configuration tolerances override the file."""
        from maasslab.core.budgets import BudgetBook

        path = tmp_path / "budgets.yaml"
        path.write_text("budgets:\n  afe.zeta: 1.0e-6\nconstants:\n  stirling: 4\n")
        book = BudgetBook(budgets_file=path, overrides={"afe.zeta": 1e-10})
        assert book.budget("afe.zeta", 1.0) == pytest.approx(1e-10)
        assert book.constant("stirling", 0.0) == 4.0

    def test_nonpositive_budget_rejected(self, tmp_path):
        """Test a zero budget in the file raises ConfigError."""
        from maasslab.core.budgets import BudgetBook
        from maasslab.errors import ConfigError

        path = tmp_path / "budgets.yaml"
        path.write_text("budgets:\n  afe.zeta: 0\n")
        with pytest.raises(ConfigError, match="must be positive"):
            BudgetBook(budgets_file=path)

    def test_malformed_yaml(self, tmp_path):
        """Test invalid YAML raises ConfigError."""
        from maasslab.core.budgets import BudgetBook
        from maasslab.errors import ConfigError

        path = tmp_path / "budgets.yaml"
        path.write_text("budgets: [unclosed\n")
        with pytest.raises(ConfigError):
            BudgetBook(budgets_file=path)

    def test_non_mapping(self, tmp_path):
        """Test a YAML list is rejected."""
        from maasslab.core.budgets import BudgetBook
        from maasslab.errors import ConfigError

        path = tmp_path / "budgets.yaml"
        path.write_text("- 1\n- 2\n")
        with pytest.raises(ConfigError, match="mapping"):
            BudgetBook(budgets_file=path)
