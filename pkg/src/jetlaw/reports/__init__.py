"""Verdict reports: schemas and the local corpus sink."""

from .local_sink import LocalReportSink
from .schemas import (
    EXIT_CODES,
    CheckOutcome,
    CorpusSummary,
    Result,
    VerdictReport,
    Witness,
)

__all__ = [
    "EXIT_CODES",
    "CheckOutcome",
    "CorpusSummary",
    "LocalReportSink",
    "Result",
    "VerdictReport",
    "Witness",
]
