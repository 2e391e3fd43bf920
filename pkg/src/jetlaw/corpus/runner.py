"""
Corpus runner: every ``[checks]`` line of every bundled ``.clw`` file.

Files are independent, so they may run in joblib workers. Workers receive file
paths and plain settings dictionaries and return CheckOutcome lists; outcomes are
merged in file order so a fixed seed gives the same summary for any job count.
"""

import logging
import time
import uuid
from dataclasses import dataclass
from datetime import datetime, timezone
from pathlib import Path
from typing import Any, Dict, List, Optional, Union

from joblib import Parallel, delayed

from jetlaw.commands import CommandOptions, run
from jetlaw.core.config_helpers import EngineSettings
from jetlaw.core.errors import JetlawError, describe
from jetlaw.core.logging_manager import log_event
from jetlaw.problem import load_problem
from jetlaw.reports import CheckOutcome, CorpusSummary, LocalReportSink, Witness

logger = logging.getLogger(__name__)


def bundled_corpus_dir() -> Path:
    return Path(__file__).resolve().parent / "examples"


def discover(directory: Optional[Union[str, Path]] = None) -> List[Path]:
    """Sorted ``.clw`` files of ``directory`` (the bundled corpus by default)."""
    root = Path(directory) if directory is not None else bundled_corpus_dir()
    if root.is_file():
        return [root]
    if not root.is_dir():
        raise FileNotFoundError(f"corpus directory not found: {root}")
    return sorted(root.glob("*.clw"))


def run_file(path: str, settings_data: Dict[str, Any], run_id: str) -> List[CheckOutcome]:
    """Run the checks of one file; errors become ``error`` results, never exceptions."""
    settings = EngineSettings(**settings_data)
    name = Path(path).name
    try:
        problem = load_problem(path, max_depth=settings.max_depth, ranking=settings.ranking)
    except (JetlawError, OSError) as exc:
        logger.error("corpus: cannot load %s: %s", name, exc)
        return [
            CheckOutcome(
                run_id=run_id,
                file=name,
                line=getattr(exc, "line", 0) or 0,
                check="load",
                expected="verified",
                result="error",
                passed=False,
                messages=[describe(exc)],
            )
        ]

    outcomes = []
    for check in problem.checks:
        started = time.monotonic()
        options = CommandOptions(
            names=list(check.names), expr_text=check.expr_text, expr=check.expr
        )
        witnesses: List[Witness] = []
        messages: List[str] = []
        try:
            report = run(check.command, problem, options, settings)
            result = report.result
            witnesses = report.witnesses
            messages = report.messages
        except JetlawError as exc:
            result = "error"
            messages = [describe(exc)]
        duration_ms = int((time.monotonic() - started) * 1000)
        outcome = CheckOutcome(
            run_id=run_id,
            file=name,
            line=check.line,
            check=check.describe(),
            expected=check.expected,  # type: ignore[arg-type]
            result=result,  # type: ignore[arg-type]
            passed=result == check.expected,
            duration_ms=duration_ms,
            witnesses=witnesses,
            messages=messages,
        )
        log_event(
            logger,
            "corpus_check",
            file=name,
            line=check.line,
            check=outcome.check,
            result=result,
            passed=outcome.passed,
            duration_ms=duration_ms,
        )
        outcomes.append(outcome)
    return outcomes


@dataclass
class CorpusResult:
    summary: CorpusSummary
    outcomes: List[CheckOutcome]

    @property
    def passed(self) -> bool:
        return self.summary.failed == 0 and self.summary.total_checks > 0


def run_corpus(
    directory: Optional[Union[str, Path]] = None,
    settings: Optional[EngineSettings] = None,
    report_dir: Optional[Union[str, Path]] = None,
    jobs: Optional[int] = None,
) -> CorpusResult:
    """
    Run every check of every corpus file

    Args:
        directory: Directory of .clw files, or a single file (bundled corpus when None)
        settings: Engine settings shared by all checks
        report_dir: When given, outcomes and the summary are written there
        jobs: joblib worker count (settings.jobs when None)

    Returns:
        CorpusResult with the summary and per-check outcomes in file order
    """
    settings = settings or EngineSettings()
    jobs = jobs or settings.jobs
    files = discover(directory)
    run_id = str(uuid.uuid4())
    started_at = datetime.now(timezone.utc).isoformat()
    started = time.monotonic()
    sink = LocalReportSink(Path(report_dir)) if report_dir is not None else None
    summary = CorpusSummary(
        run_id=run_id,
        started_at=started_at,
        seed=settings.seed,
        jobs=jobs,
        files=[f.name for f in files],
    )
    if sink is not None:
        sink.write_summary(summary)

    settings_data = settings.model_dump()
    if jobs > 1 and len(files) > 1:
        per_file = Parallel(n_jobs=jobs)(
            delayed(run_file)(str(f), settings_data, run_id) for f in files
        )
    else:
        per_file = [run_file(str(f), settings_data, run_id) for f in files]

    outcomes = [o for batch in per_file for o in batch]
    failures = [
        f"{o.file}:{o.line} {o.check} -> {o.result} (expected {o.expected})"
        for o in outcomes
        if not o.passed
    ]
    summary.ended_at = datetime.now(timezone.utc).isoformat()
    summary.total_duration_ms = int((time.monotonic() - started) * 1000)
    summary.total_checks = len(outcomes)
    summary.passed = len(outcomes) - len(failures)
    summary.failed = len(failures)
    summary.failures = failures
    summary.status = "passed" if not failures and outcomes else "failed"

    if sink is not None:
        for outcome in outcomes:
            sink.append_outcome(outcome)
        sink.write_summary(summary)

    log_event(
        logger,
        "corpus_done",
        files=len(files),
        checks=summary.total_checks,
        failed=summary.failed,
        duration_ms=summary.total_duration_ms,
    )
    return CorpusResult(summary, outcomes)
