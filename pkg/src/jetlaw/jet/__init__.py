"""Rankings, orthonomic systems and normal forms on solutions."""

from jetlaw.jet.ranking import Order, Ranking
from jetlaw.jet.system import (
    Classification,
    Equation,
    PdeSystem,
    ValidationReport,
    Violation,
    reduce_modulo,
    solve_for_lead,
)

__all__ = [
    "Classification",
    "Equation",
    "Order",
    "PdeSystem",
    "Ranking",
    "ValidationReport",
    "Violation",
    "reduce_modulo",
    "solve_for_lead",
]
