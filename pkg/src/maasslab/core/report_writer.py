"""Report bundle output: per-check JSON or CSV, summary.json and a console table."""

import csv
import json
from pathlib import Path
from typing import Any, Dict, List, Literal, Optional, Sequence

from rich.console import Console
from rich.table import Table

from config.settings import settings
from maasslab.core.check_base import CheckResult, CheckStatus
from maasslab.utils.logger import get_logger

logger = get_logger(__name__)

CSV_HEADER = [
    "check_id",
    "module",
    "provenance",
    "lhs",
    "rhs",
    "residual",
    "budget",
    "pass",
    "regime_ok",
    "inputs",
    "notes",
]


def dumps_deterministic(payload: Any) -> str:
    """JSON with sorted keys and compact separators, newline terminated."""
    return json.dumps(payload, sort_keys=True, separators=(",", ":"), ensure_ascii=False) + "\n"


def result_payload(result: CheckResult) -> Dict[str, Any]:
    """Everything about a check result except its wall-clock time."""
    return {
        "check": result.check_name,
        "group": result.group,
        "status": result.status.value,
        "error": result.error_message,
        "reports": [r.to_json_dict() for r in result.reports],
    }


class ReportWriter:
    """Writes the report bundle of one run.

    File names derive from check names only, and bodies carry no timestamps,
    so rerunning a configuration rewrites identical bytes.
    """

    def __init__(self, output_dir: Optional[Path] = None):
        """
        Initialize the writer.

        Args:
            output_dir: Directory for report files (default: settings.output_dir)
        """
        self.output_dir = Path(output_dir or settings.output_dir)
        self.output_dir.mkdir(parents=True, exist_ok=True)
        logger.debug(f"ReportWriter initialized with output_dir: {self.output_dir}")

    def write_json(self, result: CheckResult) -> Path:
        path = self.output_dir / f"{result.check_name}.json"
        path.write_text(dumps_deterministic(result_payload(result)), encoding="utf-8")
        return path

    def write_csv(self, result: CheckResult) -> Path:
        path = self.output_dir / f"{result.check_name}.csv"
        with path.open("w", newline="", encoding="utf-8") as fh:
            writer = csv.writer(fh, lineterminator="\n")
            writer.writerow(CSV_HEADER)
            for r in result.reports:
                writer.writerow(
                    [
                        r.check_id,
                        r.module,
                        r.provenance.value,
                        r.lhs,
                        r.rhs,
                        r.residual,
                        r.budget,
                        str(r.passed).lower(),
                        str(r.regime_ok).lower(),
                        json.dumps(r.inputs, sort_keys=True, separators=(",", ":")),
                        r.notes,
                    ]
                )
        return path

    def write_summary(self, results: Sequence[CheckResult]) -> Path:
        """summary.json: one row per check plus the aggregate verdict."""
        rows = [
            {
                "check": r.check_name,
                "group": r.group,
                "status": r.status.value,
                "reports": len(r.reports),
                "failed": [f.check_id for f in r.failed_reports],
                "regime_flags": sum(1 for rep in r.reports if not rep.regime_ok),
            }
            for r in results
        ]
        payload = {
            "checks": rows,
            "passed": sum(1 for r in results if r.passed),
            "failed": sum(1 for r in results if r.status == CheckStatus.FAILED),
            "errors": sum(1 for r in results if r.status == CheckStatus.ERROR),
            "pass": bool(results) and all(r.passed for r in results),
        }
        path = self.output_dir / "summary.json"
        path.write_text(dumps_deterministic(payload), encoding="utf-8")
        return path

    def write_all(
        self, results: Sequence[CheckResult], fmt: Literal["json", "csv"] = "json"
    ) -> Dict[str, Path]:
        """Write every check in ``fmt`` and the summary; returns name -> path."""
        outputs: Dict[str, Path] = {}
        for result in results:
            outputs[result.check_name] = (
                self.write_csv(result) if fmt == "csv" else self.write_json(result)
            )
        outputs["summary"] = self.write_summary(results)
        logger.info(f"Wrote {len(results)} check reports to {self.output_dir}")
        return outputs


def summary_table(results: Sequence[CheckResult]) -> Table:
    table = Table(title="maasslab acceptance summary")
    table.add_column("Check", style="cyan")
    table.add_column("Group")
    table.add_column("Reports", justify="right")
    table.add_column("Failed", justify="right")
    table.add_column("Status")
    styles = {CheckStatus.PASSED: "green", CheckStatus.FAILED: "red", CheckStatus.ERROR: "yellow"}
    for r in results:
        status = f"[{styles[r.status]}]{r.status.value}[/{styles[r.status]}]"
        failed = str(len(r.failed_reports))
        table.add_row(r.check_name, r.group, str(len(r.reports)), failed, status)
    return table


def print_summary(results: List[CheckResult], console: Optional[Console] = None) -> None:
    (console or Console()).print(summary_table(results))
