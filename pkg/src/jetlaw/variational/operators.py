"""
Euler operators, linear total-differential operators and their adjoints,
flux vectors and the divergence test.
"""

import logging
from dataclasses import dataclass
from math import comb
from typing import Dict, Iterable, List, Optional, Sequence, Tuple

import sympy
from sympy import Expr

from jetlaw.core.config_helpers import EngineSettings
from jetlaw.expr.jetspace import JetSpace, MultiIndex
from jetlaw.expr.kernel import canonicalize, total_derivative_multi
from jetlaw.expr.printing import print_expr
from jetlaw.expr.zero_test import Verdict, is_zero
from jetlaw.jet.ranking import Ranking
from jetlaw.jet.system import PdeSystem

logger = logging.getLogger(__name__)


def euler(space: JetSpace, e: Expr, v: str) -> Expr:
    """E_v(e) = Σ_J (−D)_J ∂e/∂v_J for a dependent variable or arbitrary function."""
    e = sympy.sympify(e)
    total = sympy.S.Zero
    for sym in space.coordinate_symbols(e, ("jet", "arbitrary")):
        coord = space.coordinate(sym)
        if coord.base != v:  # type: ignore[union-attr]
            continue
        partial = sympy.diff(e, sym)
        if partial == 0:
            continue
        idx = coord.idx  # type: ignore[union-attr]
        sign = -1 if idx.order % 2 else 1
        total += sign * total_derivative_multi(space, partial, idx)
    return canonicalize(total)


def is_divergence(
    space: JetSpace,
    e: Expr,
    deps: Sequence[str],
    settings: Optional[EngineSettings] = None,
) -> Verdict:
    """ProvedZero when every Euler component of ``e`` vanishes."""
    return Verdict.conjunction(
        is_zero(euler(space, e, v), settings, space.functions) for v in deps
    )


def _binomial(k: MultiIndex, l: MultiIndex) -> int:
    result = 1
    for a, b in zip(k.counts, l.counts):
        result *= comb(a, b)
    return result


@dataclass(frozen=True)
class LinDiffOp:
    """Σ_K a_K · D_K with coefficients in (x, [u])."""

    terms: Tuple[Tuple[Expr, MultiIndex], ...]

    @classmethod
    def from_terms(cls, terms: Iterable[Tuple[Expr, MultiIndex]]) -> "LinDiffOp":
        merged: Dict[MultiIndex, Expr] = {}
        for coefficient, idx in terms:
            merged[idx] = merged.get(idx, sympy.S.Zero) + coefficient
        ordered = []
        for idx in sorted(merged):
            coefficient = canonicalize(merged[idx])
            if coefficient != 0:
                ordered.append((coefficient, idx))
        return cls(tuple(ordered))

    def apply(self, space: JetSpace, e: Expr) -> Expr:
        return canonicalize(
            sum(
                (a * total_derivative_multi(space, e, idx) for a, idx in self.terms),
                sympy.S.Zero,
            )
        )

    def adjoint(self, space: JetSpace) -> "LinDiffOp":
        """(a·D_K)† = (−D)_K ∘ a, expanded by the Leibniz rule."""
        terms: List[Tuple[Expr, MultiIndex]] = []
        for a, k in self.terms:
            sign = -1 if k.order % 2 else 1
            for l in k.below():
                coefficient = sign * _binomial(k, l) * total_derivative_multi(space, a, k - l)
                terms.append((coefficient, l))
        return LinDiffOp.from_terms(terms)

    def is_zero(self) -> bool:
        return not self.terms

    def single_derivative(self) -> Optional[Tuple[Expr, int]]:
        """(a, i) when the operator is a·D_i, else None."""
        if len(self.terms) == 1:
            a, idx = self.terms[0]
            if idx.order == 1:
                return a, idx.directions()[0]
        return None

    def equals(self, other: "LinDiffOp") -> bool:
        return LinDiffOp.from_terms(
            list(self.terms) + [(-a, k) for a, k in other.terms]
        ).is_zero()

    def describe(self, space: JetSpace) -> str:
        if not self.terms:
            return "0"
        parts = []
        for a, idx in self.terms:
            op = f"D_{space.suffix(idx)}" if idx.order else "1"
            parts.append(f"({print_expr(a)})*{op}")
        return " + ".join(parts)


def adjoint(space: JetSpace, op: LinDiffOp) -> LinDiffOp:
    return op.adjoint(space)


@dataclass(frozen=True)
class FluxVector:
    """(F¹, …, Fᴺ), one component per independent variable."""

    components: Tuple[Expr, ...]

    @classmethod
    def zero(cls, n: int) -> "FluxVector":
        return cls((sympy.S.Zero,) * n)

    @classmethod
    def of(cls, components: Iterable[Expr]) -> "FluxVector":
        return cls(tuple(canonicalize(c) for c in components))

    def divergence(self, space: JetSpace) -> Expr:
        return canonicalize(
            sum(
                (space.total_derivative(f, i) for i, f in enumerate(self.components)),
                sympy.S.Zero,
            )
        )

    def __add__(self, other: "FluxVector") -> "FluxVector":
        return FluxVector.of(a + b for a, b in zip(self.components, other.components))

    def __sub__(self, other: "FluxVector") -> "FluxVector":
        return FluxVector.of(a - b for a, b in zip(self.components, other.components))

    def scaled(self, factor: Expr) -> "FluxVector":
        return FluxVector.of(factor * c for c in self.components)

    def nonzero(self) -> List[int]:
        return [i for i, c in enumerate(self.components) if canonicalize(c) != 0]

    def equals(self, other: "FluxVector") -> bool:
        return not (self - other).nonzero()


def euler_lagrange_system(
    space: JetSpace,
    lagrangian: Expr,
    leads=None,
    ranking: Optional[Ranking] = None,
    max_depth: int = 64,
) -> PdeSystem:
    """Orthonomic system E_{u^α}(L) = 0 with the declared leads."""
    components = [euler(space, lagrangian, u) for u in space.dependents]
    return PdeSystem.from_components(
        space, components, ranking, leads=leads, max_depth=max_depth
    )
