"""
LocalReportSink: corpus artifacts on the local filesystem.

``checks.jsonl`` gets one CheckOutcome per line, appended as checks finish.
``corpus_summary.json`` is rewritten whole through a temporary file in the same
directory and ``os.replace``, so readers see either the old or the new summary.
"""
from __future__ import annotations

import os
import tempfile
import threading
from pathlib import Path
from typing import List, Optional

from .schemas import CheckOutcome, CorpusSummary

CHECKS_FILE = "checks.jsonl"
SUMMARY_FILE = "corpus_summary.json"


class LocalReportSink:
    def __init__(self, report_dir: Path) -> None:
        self.report_dir = Path(report_dir)
        self.report_dir.mkdir(parents=True, exist_ok=True)
        self.checks_path = self.report_dir / CHECKS_FILE
        self.summary_path = self.report_dir / SUMMARY_FILE
        self._lock = threading.Lock()

    def append_outcome(self, outcome: CheckOutcome) -> None:
        line = outcome.model_dump_json() + "\n"
        with self._lock, self.checks_path.open("a", encoding="utf-8") as handle:
            handle.write(line)

    def read_outcomes(self) -> List[CheckOutcome]:
        if not self.checks_path.exists():
            return []
        lines = self.checks_path.read_text(encoding="utf-8").splitlines()
        return [CheckOutcome.model_validate_json(line) for line in lines if line.strip()]

    def write_summary(self, summary: CorpusSummary) -> None:
        payload = summary.model_dump_json(indent=2)
        with self._lock:
            fd, tmp = tempfile.mkstemp(
                dir=self.report_dir, prefix=".summary-", suffix=".tmp"
            )
            try:
                with os.fdopen(fd, "w", encoding="utf-8") as handle:
                    handle.write(payload)
                os.replace(tmp, self.summary_path)
            except BaseException:
                Path(tmp).unlink(missing_ok=True)
                raise

    def read_summary(self) -> Optional[CorpusSummary]:
        if not self.summary_path.exists():
            return None
        return CorpusSummary.model_validate_json(self.summary_path.read_text(encoding="utf-8"))
