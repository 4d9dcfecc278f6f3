"""Calibrated constants and per-check budgets."""

from pathlib import Path
from typing import Any, Dict, Mapping, Optional

import yaml

from config.settings import settings
from maasslab.errors import ConfigError
from maasslab.utils.logger import get_logger

logger = get_logger(__name__)


class BudgetBook:
    """Budgets keyed by check id, loaded from ``config/budgets.yaml``.

    Run-configuration tolerances override the file; the file overrides the
    built-in defaults.
    """

    def __init__(
        self,
        budgets_file: Optional[Path] = None,
        overrides: Optional[Mapping[str, float]] = None,
    ):
        """
        Initialize the budget book.

        Args:
            budgets_file: YAML file with ``budgets`` and ``constants`` maps
                (default: settings.budgets_path)
            overrides: ``tolerances.<check>`` values from a RunConfig
        """
        self.budgets_file = Path(budgets_file or settings.budgets_path)
        self.budgets: Dict[str, float] = {}
        self.constants: Dict[str, Any] = {}

        if self.budgets_file.exists():
            self.load_budgets()
            logger.info(f"Loaded {len(self.budgets)} budgets from {self.budgets_file}")
        else:
            logger.warning(f"Budgets file not found: {self.budgets_file}")
            self._create_default_budgets()

        for check_id, value in (overrides or {}).items():
            self.budgets[check_id] = float(value)
            logger.debug(f"Budget override {check_id} = {value}")

    def load_budgets(self) -> None:
        """Load budgets from the YAML file."""
        try:
            with open(self.budgets_file, "r", encoding="utf-8") as f:
                data = yaml.safe_load(f) or {}
        except (OSError, yaml.YAMLError) as e:
            raise ConfigError(f"cannot read budgets file {self.budgets_file}: {e}") from e
        if not isinstance(data, dict):
            raise ConfigError(f"budgets file {self.budgets_file} must hold a mapping")
        self.budgets = {str(k): float(v) for k, v in (data.get("budgets") or {}).items()}
        self.constants = dict(data.get("constants") or {})
        for check_id, value in self.budgets.items():
            if value <= 0:
                raise ConfigError(f"budget for {check_id} must be positive, got {value}")

    def _create_default_budgets(self) -> None:
        """Fallback budgets matching the shipped file."""
        self.budgets = {
            "gamma.reflection": 1e-20,
            "gamma.kbessel_mellin": 1e-10,
            "afe.zeta": settings.identity_tolerance,
            "afe.sym2": 1e-3,
            "diagonal.main": 0.02,
            "diagonal.limit": 0.07,
            "voronoi.identity.c1": 1e-2,
        }
        self.constants = {
            "stirling": settings.stirling_constant,
            "envelope": settings.envelope_constant,
            "eisenstein_envelope": 10.0,
            "j0": 1.0,
        }
        logger.info("Using default budgets")

    def budget(self, check_id: str, default: float) -> float:
        return self.budgets.get(check_id, default)

    def constant(self, name: str, default: float) -> float:
        return float(self.constants.get(name, default))
