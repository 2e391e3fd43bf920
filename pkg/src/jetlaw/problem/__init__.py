"""Problem files: expression grammar, sectioned loader and canonical printer."""

from jetlaw.problem.grammar import ExpressionBuilder, parse_expression, parse_tree
from jetlaw.problem.loader import (
    SECTION_ORDER,
    Check,
    HodographSpec,
    ProblemFile,
    RawSection,
    load_problem,
    parse_problem,
    print_problem,
    problem_from_expression,
    read_sections,
)

__all__ = [
    "SECTION_ORDER",
    "Check",
    "ExpressionBuilder",
    "HodographSpec",
    "ProblemFile",
    "RawSection",
    "load_problem",
    "parse_expression",
    "parse_problem",
    "parse_tree",
    "print_problem",
    "problem_from_expression",
    "read_sections",
]
