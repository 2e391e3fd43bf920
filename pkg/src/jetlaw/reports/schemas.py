"""
Pydantic schemas for verdict reports and corpus artifacts.

All report, outcome and summary types are defined here.
No business logic; pure data contracts.
"""
from __future__ import annotations

import uuid
from datetime import datetime, timezone
from typing import Dict, List, Literal, Optional

from pydantic import BaseModel, Field

SCHEMA_VERSION = "1.0"

Result = Literal["verified", "refuted", "numeric-only", "error"]

EXIT_CODES: Dict[str, int] = {
    "verified": 0,
    "refuted": 1,
    "error": 2,
    "numeric-only": 3,
}


def _utc_now() -> str:
    return datetime.now(timezone.utc).isoformat()


def _uuid4() -> str:
    return str(uuid.uuid4())


class Witness(BaseModel):
    label: str
    expr: str


class VerdictReport(BaseModel):
    command: str
    input_name: str = ""
    inputs_digest: str = ""
    result: Result
    witnesses: List[Witness] = Field(default_factory=list)
    seed: int = 0
    probes: int = 16
    tol: float = 1e-9
    messages: List[str] = Field(default_factory=list)
    duration_ms: Optional[int] = None
    schema_version: str = SCHEMA_VERSION

    @property
    def exit_code(self) -> int:
        return EXIT_CODES[self.result]

    def witness(self, label: str) -> Optional[str]:
        for w in self.witnesses:
            if w.label == label:
                return w.expr
        return None


class CheckOutcome(BaseModel):
    outcome_id: str = Field(default_factory=_uuid4)
    run_id: str
    file: str
    line: int
    check: str
    expected: Result
    result: Result
    passed: bool
    duration_ms: Optional[int] = None
    ts_utc: str = Field(default_factory=_utc_now)
    witnesses: List[Witness] = Field(default_factory=list)
    messages: List[str] = Field(default_factory=list)


class CorpusSummary(BaseModel):
    run_id: str
    schema_version: str = SCHEMA_VERSION
    started_at: str
    ended_at: Optional[str] = None
    total_duration_ms: Optional[int] = None
    seed: int = 0
    jobs: int = 1
    files: List[str] = Field(default_factory=list)
    total_checks: int = 0
    passed: int = 0
    failed: int = 0
    failures: List[str] = Field(default_factory=list)
    status: str = "running"
