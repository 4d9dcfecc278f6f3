"""Run configuration for the acceptance suite."""

from pathlib import Path
from typing import Literal, Optional

from pydantic import BaseModel, Field, ValidationError, field_validator

from maasslab.errors import ConfigError


class RunConfig(BaseModel):
    """Inputs of ``run_all`` and the CLI subcommands."""

    T_list: list[float] = Field(..., description="Spectral parameters of the acceptance grid")
    alpha: float = Field(0.2, gt=0, lt=1)
    delta_c: float = Field(0.01, gt=0, lt=0.5, description="Diagonal window ratio")
    precision_bits: int = Field(128, ge=64)
    spectrum_path: Optional[Path] = None
    tolerances: dict[str, float] = Field(default_factory=dict)
    output_dir: Path = Path("reports")
    format: Literal["json", "csv"] = "json"
    seed: int = 20240601
    max_workers: int = Field(1, ge=1)
    checks: list[str] = Field(default_factory=list, description="Subset of checks; empty = all")

    @field_validator("T_list")
    @classmethod
    def validate_T_list(cls, v: list[float]) -> list[float]:
        if not v:
            raise ValueError("T_list must be nonempty")
        if any(T <= 0 for T in v):
            raise ValueError("T_list entries must be positive")
        return v

    @field_validator("tolerances")
    @classmethod
    def validate_tolerances(cls, v: dict[str, float]) -> dict[str, float]:
        for name, budget in v.items():
            if budget <= 0:
                raise ValueError(f"budget for {name} must be positive")
        return v

    @classmethod
    def from_file(cls, path: Path) -> "RunConfig":
        """Parse UTF-8 ``key = value`` lines; ``tolerances.<check> = <x>`` sets budgets."""
        try:
            text = Path(path).read_text(encoding="utf-8")
        except OSError as e:
            raise ConfigError(f"cannot read config {path}: {e}") from e
        return cls.from_text(text)

    @classmethod
    def from_text(cls, text: str) -> "RunConfig":
        data: dict = {}
        tolerances: dict[str, float] = {}
        list_fields = {"T_list", "checks"}
        for line_no, raw in enumerate(text.splitlines(), start=1):
            line = raw.split("#", 1)[0].strip()
            if not line:
                continue
            if "=" not in line:
                raise ConfigError(f"line {line_no}: expected 'key = value', got {raw!r}")
            key, value = (part.strip() for part in line.split("=", 1))
            if key.startswith("tolerances."):
                try:
                    tolerances[key.split(".", 1)[1]] = float(value)
                except ValueError as e:
                    raise ConfigError(f"line {line_no}: bad tolerance {value!r}") from e
            elif key in list_fields:
                data[key] = [item.strip() for item in value.split(",") if item.strip()]
            elif key in cls.model_fields:
                data[key] = value
            else:
                raise ConfigError(f"line {line_no}: unknown key {key!r}")
        if tolerances:
            data["tolerances"] = tolerances
        try:
            return cls(**data)
        except ValidationError as e:
            raise ConfigError(f"invalid run configuration: {e}") from e
