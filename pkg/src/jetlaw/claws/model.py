"""
Data types for conservation laws, multipliers and linear constraints on the
arbitrary functions g^r.
"""

from dataclasses import dataclass, field
from typing import Dict, List, Optional, Sequence, Tuple

import sympy
from sympy import Expr

from jetlaw.core.errors import InvalidSystem
from jetlaw.expr.jetspace import ArbFnVar, JetSpace
from jetlaw.expr.kernel import canonicalize
from jetlaw.expr.printing import print_expr
from jetlaw.expr.zero_test import Verdict
from jetlaw.jet.ranking import Ranking
from jetlaw.jet.system import PdeSystem, ValidationReport
from jetlaw.variational.operators import FluxVector, LinDiffOp


@dataclass(frozen=True)
class ConservationLaw:
    """Div F, given by fluxes or, when fluxes are unavailable, by the divergence."""

    fluxes: Optional[FluxVector]
    name: str = ""
    divergence_expr: Optional[Expr] = None

    @classmethod
    def from_divergence(cls, expr: Expr, name: str = "") -> "ConservationLaw":
        return cls(None, name, canonicalize(expr))

    def divergence(self, space: JetSpace) -> Expr:
        if self.fluxes is not None:
            return self.fluxes.divergence(space)
        return canonicalize(self.divergence_expr)

    def arbitrary_functions(self, space: JetSpace) -> List[str]:
        if self.fluxes is not None:
            exprs = list(self.fluxes.components)
        else:
            exprs = [self.divergence_expr]
        bases = set()
        for e in exprs:
            for sym in space.coordinate_symbols(e, ("arbitrary",)):
                bases.add(space.coordinate(sym).base)  # type: ignore[union-attr]
        return [g for g in space.arbitrary if g in bases]

    def __sub__(self, other: "ConservationLaw") -> "ConservationLaw":
        if self.fluxes is not None and other.fluxes is not None:
            return ConservationLaw(self.fluxes - other.fluxes, f"{self.name}-{other.name}")
        raise ValueError("difference of divergence-only laws needs a JetSpace")

    def minus(self, space: JetSpace, other: "ConservationLaw") -> "ConservationLaw":
        if self.fluxes is not None and other.fluxes is not None:
            return self - other
        return ConservationLaw.from_divergence(
            self.divergence(space) - other.divergence(space), f"{self.name}-{other.name}"
        )

    def describe(self, space: JetSpace) -> Dict[str, str]:
        if self.fluxes is None:
            return {"divergence": print_expr(self.divergence_expr)}
        return {
            f"F_{x}": print_expr(c) for x, c in zip(space.independents, self.fluxes.components)
        }


@dataclass(frozen=True)
class Multiplier:
    components: Tuple[Expr, ...]
    name: str = ""

    @classmethod
    def of(cls, components: Sequence[Expr], name: str = "") -> "Multiplier":
        return cls(tuple(canonicalize(c) for c in components), name)

    def dot(self, components: Sequence[Expr]) -> Expr:
        if len(components) != len(self.components):
            raise InvalidSystem(
                f"multiplier has {len(self.components)} components, system has "
                f"{len(components)} equations"
            )
        return canonicalize(sum((q * a for q, a in zip(self.components, components)), sympy.S.Zero))

    def describe(self) -> Dict[str, str]:
        return {f"Q{mu + 1}": print_expr(q) for mu, q in enumerate(self.components)}


@dataclass
class ConstraintSet:
    """Rows l, columns r: Σ_r 𝒟ˡ_r g^r = 0."""

    space: JetSpace
    ops: List[List[LinDiffOp]]
    rows: List[Expr] = field(default_factory=list)

    @classmethod
    def from_rows(cls, space: JetSpace, rows: Sequence[Expr]) -> "ConstraintSet":
        """Read operators off rows that are linear and homogeneous in the g-jets."""
        ops: List[List[LinDiffOp]] = []
        canonical_rows = []
        for row in rows:
            row = canonicalize(row)
            line: Dict[str, list] = {g: [] for g in space.arbitrary}
            rebuilt = sympy.S.Zero
            for sym in space.coordinate_symbols(row, ("arbitrary",)):
                coord = space.coordinate(sym)
                coefficient = canonicalize(sympy.diff(row, sym))
                if space.coordinate_symbols(coefficient, ("arbitrary",)):
                    raise InvalidSystem(f"constraint {print_expr(row)} is not linear in g")
                if space.coordinate_symbols(coefficient, ("jet",)):
                    raise InvalidSystem(
                        f"constraint {print_expr(row)} has coefficients depending on [u]"
                    )
                line[coord.base].append((coefficient, coord.idx))  # type: ignore[union-attr]
                rebuilt += coefficient * sym
            if canonicalize(row - rebuilt) != 0:
                raise InvalidSystem(f"constraint {print_expr(row)} is not homogeneous in g")
            if rebuilt == 0:
                raise InvalidSystem("constraint row without arbitrary functions")
            ops.append([LinDiffOp.from_terms(line[g]) for g in space.arbitrary])
            canonical_rows.append(row)
        return cls(space, ops, canonical_rows)

    @classmethod
    def empty(cls, space: JetSpace) -> "ConstraintSet":
        return cls(space, [], [])

    def __len__(self) -> int:
        return len(self.ops)

    def is_free(self, g: str) -> bool:
        r = self.space.arbitrary.index(g)
        return all(row[r].is_zero() for row in self.ops)

    def rows_touching(self, g: str) -> List[int]:
        r = self.space.arbitrary.index(g)
        return [l for l, row in enumerate(self.ops) if not row[r].is_zero()]

    def system(self, ranking: Optional[Ranking] = None, max_depth: int = 64) -> Optional[PdeSystem]:
        """The rows as an orthonomic system in the g-jets."""
        if not self.rows:
            return None
        return PdeSystem.from_components(
            self.space, self.rows, ranking, max_depth=max_depth, kind="arbitrary"
        )

    def consistency(self, ranking: Optional[Ranking] = None) -> ValidationReport:
        """Orthonomic check of the rows solved for their highest g-jets."""
        gsys = self.system(ranking)
        return gsys.validate_orthonomic() if gsys is not None else ValidationReport()

    def describe(self) -> List[str]:
        return [f"{print_expr(row)} = 0" for row in self.rows]


@dataclass
class LambdaSolution:
    components: Tuple[Expr, ...]
    verdict: Verdict = Verdict.UNKNOWN

    def describe(self) -> Dict[str, str]:
        return {f"lambda{l + 1}": print_expr(c) for l, c in enumerate(self.components)}


@dataclass
class CharacteristicForm:
    multiplier: Multiplier
    restricted: Tuple[Expr, ...]
    remainder: Verdict
    check: Verdict

    @property
    def verdict(self) -> Verdict:
        return Verdict.conjunction([self.remainder, self.check])


def arbitrary_atom(space: JetSpace, g: str) -> sympy.Symbol:
    return space.symbol(ArbFnVar(g, space.index("")))
