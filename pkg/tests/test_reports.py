"""
Tests for verdict report schemas and the local corpus sink
"""

import json

import pytest
from pydantic import ValidationError

from jetlaw.reports import (
    EXIT_CODES,
    CheckOutcome,
    CorpusSummary,
    LocalReportSink,
    VerdictReport,
    Witness,
)


def _outcome(run_id="run-1", check="verify-cl", result="verified", expected="verified"):
    return CheckOutcome(
        run_id=run_id,
        file="heat.clw",
        line=12,
        check=check,
        expected=expected,
        result=result,
        passed=result == expected,
    )


class TestVerdictReport:
    def test_exit_codes(self):
        assert EXIT_CODES == {"verified": 0, "refuted": 1, "error": 2, "numeric-only": 3}
        assert VerdictReport(command="reduce", result="numeric-only").exit_code == 3

    def test_witness_lookup(self):
        report = VerdictReport(
            command="char-form",
            result="verified",
            witnesses=[Witness(label="Q1", expr="x"), Witness(label="residual", expr="0")],
        )
        assert report.witness("Q1") == "x"
        assert report.witness("Q2") is None

    def test_unknown_result_rejected(self):
        with pytest.raises(ValidationError):
            VerdictReport(command="reduce", result="maybe")


class TestLocalReportSink:
    """checks.jsonl appends and the atomic summary write"""

    def test_creates_directory(self, tmp_path):
        sink = LocalReportSink(tmp_path / "nested" / "reports")
        assert sink.report_dir.is_dir()
        assert sink.read_outcomes() == []
        assert sink.read_summary() is None

    def test_append_and_read(self, tmp_path):
        sink = LocalReportSink(tmp_path)
        sink.append_outcome(_outcome(check="verify-cl"))
        sink.append_outcome(_outcome(check="bridge", result="refuted"))
        outcomes = sink.read_outcomes()
        assert [o.check for o in outcomes] == ["verify-cl", "bridge"]
        assert [o.passed for o in outcomes] == [True, False]
        assert len(sink.checks_path.read_text().splitlines()) == 2

    def test_summary_is_replaced_atomically(self, tmp_path):
        sink = LocalReportSink(tmp_path)
        summary = CorpusSummary(run_id="run-1", started_at="2026-01-01T00:00:00+00:00")
        sink.write_summary(summary)
        finished = summary.model_copy(update={"status": "completed", "total_checks": 2, "passed": 2})
        sink.write_summary(finished)
        data = json.loads(sink.summary_path.read_text())
        assert data["status"] == "completed"
        assert sink.read_summary().total_checks == 2
        assert not list(tmp_path.glob("*.tmp"))
