"""Laboratory configuration settings."""

import logging
from pathlib import Path
from typing import Optional

from pydantic import Field
from pydantic_settings import BaseSettings, SettingsConfigDict


def get_base_dir() -> Path:
    """Get the project root directory.

    Returns:
        Path: Directory holding ``config/``, ``data/`` and the default ``reports/``
    """
    return Path(__file__).parent.parent


class Settings(BaseSettings):
    """Laboratory settings with environment variable support."""

    model_config = SettingsConfigDict(
        env_prefix="MAASSLAB_",
        env_file=".env",
        env_file_encoding="utf-8",
        case_sensitive=False,
    )

    project_root: Path = Field(
        default_factory=get_base_dir,
        description="Project root directory",
    )

    data_dir: Path = Field(
        default_factory=lambda: get_base_dir() / "data",
        description="Directory holding spectrum files",
    )

    output_dir: Path = Field(
        default_factory=lambda: get_base_dir() / "reports",
        description="Directory receiving JSON/CSV verification reports",
    )

    spectrum_path: Path = Field(
        default_factory=lambda: get_base_dir() / "data" / "spectrum_level1_window.txt",
        description="Default level-1 Maass spectrum file",
    )

    budgets_path: Path = Field(
        default_factory=lambda: get_base_dir() / "config" / "budgets.yaml",
        description="Calibrated constants and per-check budgets",
    )

    run_config_path: Path = Field(
        default_factory=lambda: get_base_dir() / "config" / "default_run.conf",
        description="Run configuration used when the CLI gets no --config",
    )

    log_file: Optional[Path] = Field(
        default=None,
        description="Optional log file path",
    )

    log_level: str = Field(
        default="INFO",
        description="Logging level (DEBUG, INFO, WARNING, ERROR, CRITICAL)",
    )

    default_precision_bits: int = Field(
        default=128,
        description="Working precision for gamma, zeta and kernel evaluations",
        ge=64,
        le=4096,
    )

    bessel_precision_bits: int = Field(
        default=512,
        description="Working precision for imaginary-order Bessel transforms",
        ge=64,
        le=8192,
    )

    max_precision_bits: int = Field(
        default=4096,
        description="Hard ceiling for automatic precision boosts",
        ge=128,
        le=65536,
    )

    epsilon: float = Field(
        default=0.05,
        description="Concrete value of the epsilon convention in every audited bound",
        gt=0.0,
        lt=0.5,
    )

    stirling_constant: float = Field(
        default=10.0,
        description="Constant C in the Stirling envelope C/(1+|gamma|)",
        gt=0.0,
    )

    envelope_constant: float = Field(
        default=100.0,
        description="Default constant for calibrated envelope checks",
        gt=0.0,
    )

    hecke_tolerance: float = Field(
        default=1e-8,
        description="Tolerance for Hecke relations on ingested eigenvalues",
        gt=0.0,
    )

    identity_tolerance: float = Field(
        default=1e-8,
        description="Tolerance for exact-identity checks",
        gt=0.0,
    )

    def ensure_directories(self) -> None:
        """Create necessary directories if they don't exist."""
        self.data_dir.mkdir(parents=True, exist_ok=True)
        self.output_dir.mkdir(parents=True, exist_ok=True)

        if self.log_file:
            self.log_file.parent.mkdir(parents=True, exist_ok=True)

    @property
    def log_level_int(self) -> int:
        """Convert log level string to integer."""
        return getattr(logging, self.log_level.upper(), logging.INFO)


settings = Settings()
