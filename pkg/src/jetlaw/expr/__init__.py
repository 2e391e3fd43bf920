"""Expressions over jet coordinates: symbols, canonical forms, zero testing."""

from jetlaw.expr.jetspace import (
    ArbFnVar,
    Coordinate,
    FieldSpec,
    FieldVar,
    JetSpace,
    JetVar,
    MultiIndex,
)
from jetlaw.expr.kernel import (
    canonicalize,
    jet_order,
    partial,
    substitute,
    total_derivative,
    total_derivative_multi,
)
from jetlaw.expr.opaque import OpaqueApplication, OpaqueRegistry
from jetlaw.expr.printing import print_expr
from jetlaw.expr.zero_test import Verdict, ZeroTester, eval_numeric, is_zero

__all__ = [
    "ArbFnVar",
    "Coordinate",
    "FieldSpec",
    "FieldVar",
    "JetSpace",
    "JetVar",
    "MultiIndex",
    "OpaqueApplication",
    "OpaqueRegistry",
    "Verdict",
    "ZeroTester",
    "canonicalize",
    "eval_numeric",
    "is_zero",
    "jet_order",
    "partial",
    "print_expr",
    "substitute",
    "total_derivative",
    "total_derivative_multi",
]
