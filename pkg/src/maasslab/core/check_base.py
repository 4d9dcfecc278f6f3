"""Base classes for the check layer.

A check turns one acceptance grid into a list of VerificationReports. Checks
are registered once and grouped by the CLI subcommand that runs them.
"""

import time
from abc import ABC, abstractmethod
from dataclasses import dataclass, field
from enum import Enum
from typing import Callable, Dict, List, Optional

from maasslab.core.budgets import BudgetBook
from maasslab.errors import (
    ConfigError,
    InsufficientDataError,
    MaassLabError,
    SpectrumParseError,
    SpectrumValidationError,
)
from maasslab.models import RunConfig, VerificationReport
from maasslab.utils.logger import get_logger

logger = get_logger(__name__)

ProgressCallback = Callable[[int, str], None]

# input problems abort the run instead of becoming an ERROR result
DATA_ERRORS = (ConfigError, InsufficientDataError, SpectrumParseError, SpectrumValidationError)


class CheckStatus(Enum):
    """Outcome of a check execution."""

    PASSED = "passed"
    FAILED = "failed"
    ERROR = "error"


class CheckCategory(Enum):
    """What a check compares against."""

    IDENTITY = "identity"  # both sides of an exact identity
    ENVELOPE = "envelope"  # a quantity against a calibrated bound
    ORACLE = "oracle"  # an independent high-precision evaluation
    EXACT = "exact"  # integer arithmetic, zero tolerance


@dataclass
class CheckResult:
    """Reports of one check plus its status."""

    check_name: str
    group: str
    status: CheckStatus
    reports: List[VerificationReport] = field(default_factory=list)
    elapsed: float = 0.0
    error_message: Optional[str] = None

    @property
    def passed(self) -> bool:
        return self.status == CheckStatus.PASSED

    @property
    def failed_reports(self) -> List[VerificationReport]:
        return [r for r in self.reports if not r.passed]


class Check(ABC):
    """Base class for all acceptance checks."""

    @property
    @abstractmethod
    def name(self) -> str:
        """Unique identifier (e.g. 'gamma.reflection')."""

    @property
    @abstractmethod
    def display_name(self) -> str:
        """Human-readable name for summary tables."""

    @property
    @abstractmethod
    def group(self) -> str:
        """CLI subcommand that runs this check (e.g. 'gamma-audit')."""

    @property
    @abstractmethod
    def category(self) -> CheckCategory:
        """What the check compares against."""

    @property
    def description(self) -> str:
        return self.display_name

    @property
    def needs_spectrum(self) -> bool:
        """Whether the check reads the Maass spectrum file."""
        return False

    @abstractmethod
    def run(
        self,
        config: RunConfig,
        budgets: BudgetBook,
        progress_callback: Optional[ProgressCallback] = None,
    ) -> List[VerificationReport]:
        """Run the acceptance grid.

        Args:
            config: Run configuration (T grid, precision, tolerances)
            budgets: Budgets and calibrated constants
            progress_callback: Optional callback, called with (percent, message)

        Returns:
            One report per grid point
        """

    def execute(
        self,
        config: RunConfig,
        budgets: BudgetBook,
        progress_callback: Optional[ProgressCallback] = None,
    ) -> CheckResult:
        """Run and wrap the outcome; numerical library errors become an ERROR result."""
        logger.info(f"Running check {self.name}")
        started = time.perf_counter()
        try:
            reports = self.run(config, budgets, progress_callback)
        except DATA_ERRORS:
            raise
        except MaassLabError as e:
            logger.error(f"Check {self.name} aborted: {e}")
            return CheckResult(
                check_name=self.name,
                group=self.group,
                status=CheckStatus.ERROR,
                elapsed=time.perf_counter() - started,
                error_message=str(e),
            )
        passed = bool(reports) and all(r.passed for r in reports)
        status = CheckStatus.PASSED if passed else CheckStatus.FAILED
        for report in reports:
            if not report.regime_ok:
                logger.warning(f"{report.check_id}: desk-scale parameters outside the regime")
        elapsed = time.perf_counter() - started
        logger.info(f"Check {self.name}: {status.value} ({len(reports)} reports, {elapsed:.1f}s)")
        return CheckResult(self.name, self.group, status, reports, elapsed)

    def report_progress(self, percent: int, message: str, callback: Optional[ProgressCallback]):
        if callback:
            callback(percent, message)

    @staticmethod
    def select_T(
        config: RunConfig, lo: float, hi: float, fallback: tuple[float, ...]
    ) -> List[float]:
        """Entries of config.T_list inside [lo, hi], or ``fallback`` when none are."""
        chosen = [T for T in config.T_list if lo <= T <= hi]
        return chosen or list(fallback)


class CheckRegistry:
    """Central registry of checks, in registration order."""

    def __init__(self):
        self._checks: Dict[str, Check] = {}

    def register(self, check: Check):
        """Register a check.

        Raises:
            ValueError: If a check with the same name is already registered
        """
        if check.name in self._checks:
            raise ValueError(f"Check '{check.name}' is already registered")
        self._checks[check.name] = check

    def get(self, check_name: str) -> Optional[Check]:
        return self._checks.get(check_name)

    def list_all(self) -> List[Check]:
        return list(self._checks.values())

    def list_by_category(self, category: CheckCategory) -> List[Check]:
        return [c for c in self._checks.values() if c.category == category]

    def list_by_group(self, group: str) -> List[Check]:
        return [c for c in self._checks.values() if c.group == group]

    def groups(self) -> List[str]:
        """Distinct groups in registration order."""
        return list(dict.fromkeys(c.group for c in self._checks.values()))

    def is_registered(self, check_name: str) -> bool:
        return check_name in self._checks

    def count(self) -> int:
        return len(self._checks)


_global_registry = CheckRegistry()


def get_check_registry() -> CheckRegistry:
    """Get the global registry, importing the bundled checks on first use."""
    if not _global_registry.count():
        from maasslab.core import checks  # noqa: F401  (registers on import)
    return _global_registry


def register_check(check: Check):
    _global_registry.register(check)


def get_check(check_name: str) -> Optional[Check]:
    return get_check_registry().get(check_name)
