"""Unit tests for ReportWriter and the summary table."""

import csv
import json

import pytest


def _result(name="gamma.reflection", residuals=(0.0, 0.2), status=None):
    from maasslab.core.check_base import CheckResult, CheckStatus
    from maasslab.models import Provenance, VerificationReport

    reports = [
        VerificationReport.build(
            check_id=name,
            module="gamma",
            inputs={"gamma": g, "bits": 128},
            lhs=1 + r,
            rhs=1,
            residual=r,
            budget=1e-20 if r == 0.0 else 0.25,
            provenance=Provenance.PAPER,
            notes="note, with a comma",
        )
        for g, r in zip((0.1, 1.0, 5.0), residuals)
    ]
    if status is None:
        passed = all(rep.passed for rep in reports)
        status = CheckStatus.PASSED if passed else CheckStatus.FAILED
    return CheckResult(name, "gamma-audit", status, reports, elapsed=1.234)


@pytest.mark.unit
class TestReportWriter:
    """Test report bundle output."""

    def test_json_is_sorted_and_compact(self, reports_dir):
        """Test per-check JSON has sorted keys, no spaces and no timing."""
        from maasslab.core.report_writer import ReportWriter

        path = ReportWriter(reports_dir).write_json(_result())
        text = path.read_text(encoding="utf-8")
        payload = json.loads(text)

        assert path.name == "gamma.reflection.json"
        assert text.endswith("\n")
        assert ", " not in text.split('"notes"')[0]
        assert list(payload) == sorted(payload)
        assert "elapsed" not in text
        assert payload["status"] == "passed"
        assert payload["reports"][0]["pass"] is True

    def test_rewrite_is_byte_identical(self, tmp_path):
        """Test two writers produce identical bytes for the same result."""
        from maasslab.core.report_writer import ReportWriter

        first = ReportWriter(tmp_path / "a").write_all([_result()])
        second = ReportWriter(tmp_path / "b").write_all([_result()])
        for key in first:
            assert first[key].read_bytes() == second[key].read_bytes()

    def test_csv_rows(self, reports_dir):
        """Test the CSV header and one row per report."""
        from maasslab.core.report_writer import CSV_HEADER, ReportWriter

        path = ReportWriter(reports_dir).write_csv(_result(residuals=(0.0, 0.5)))
        with path.open(newline="", encoding="utf-8") as fh:
            rows = list(csv.reader(fh))

        assert rows[0] == CSV_HEADER
        assert len(rows) == 3
        record = dict(zip(CSV_HEADER, rows[2]))
        assert record["pass"] == "false"
        assert record["notes"] == "note, with a comma"
        assert json.loads(record["inputs"]) == {"bits": "128", "gamma": "1.0"}

    def test_summary(self, reports_dir):
        """Test summary.json counts and the aggregate verdict."""
        from maasslab.core.check_base import CheckStatus
        from maasslab.core.report_writer import ReportWriter

        results = [
            _result(),
            _result("gamma.stirling", residuals=(0.0, 0.5)),
            _result("gamma.kbessel_mellin", residuals=(), status=CheckStatus.ERROR),
        ]
        outputs = ReportWriter(reports_dir).write_all(results, fmt="csv")
        summary = json.loads(outputs["summary"].read_text(encoding="utf-8"))

        assert outputs["gamma.reflection"].suffix == ".csv"
        assert summary["pass"] is False
        assert summary["passed"] == 1
        assert summary["failed"] == 1
        assert summary["errors"] == 1
        assert [row["check"] for row in summary["checks"]] == [r.check_name for r in results]

    def test_all_pass(self, reports_dir):
        """Test the verdict when every check passes."""
        from maasslab.core.report_writer import ReportWriter

        outputs = ReportWriter(reports_dir).write_all([_result(residuals=(0.0,))])
        summary = json.loads(outputs["summary"].read_text(encoding="utf-8"))
        assert summary["pass"] is True
        assert summary["checks"][0]["failed"] == []

    def test_creates_directory(self, tmp_path):
        """Test the output directory is created."""
        from maasslab.core.report_writer import ReportWriter

        target = tmp_path / "nested" / "reports"
        ReportWriter(target)
        assert target.is_dir()


@pytest.mark.unit
class TestSummaryTable:
    """Test the rich summary table."""

    def test_rows(self):
        """Test one row per check."""
        from maasslab.core.report_writer import summary_table

        table = summary_table([_result(), _result("gamma.stirling")])
        assert table.row_count == 2

    def test_print(self):
        """Test printing to a recording console."""
        from rich.console import Console

        from maasslab.core.report_writer import print_summary

        console = Console(record=True, width=120)
        print_summary([_result(residuals=(0.0, 0.5))], console=console)
        text = console.export_text()
        assert "gamma.reflection" in text
        assert "failed" in text
