"""
Orthonomic PDE systems and reduction to normal form on solutions.

Each equation keeps its component A_µ exactly as written and its lead. Principal
derivatives lead_µ + K are eliminated through the quasi-linear identity
D_K A_µ = c·lead_{µ+K} + R_K, solved for lead_{µ+K}. Substituting 0 for A
gives the normal form f|₀; substituting placeholder symbols a_{µK} gives the
characteristic-form coordinates used by the conservation-law module.
"""

import logging
import threading
from dataclasses import dataclass, field
from enum import Enum
from typing import Dict, List, Optional, Sequence, Set, Tuple

import sympy
from sympy import Dummy, Expr, Symbol

from jetlaw.core.config_helpers import EngineSettings
from jetlaw.core.errors import InvalidSystem
from jetlaw.expr.jetspace import Coordinate, JetSpace, MultiIndex
from jetlaw.expr.kernel import canonicalize
from jetlaw.expr.printing import print_expr
from jetlaw.expr.zero_test import Verdict, is_zero
from jetlaw.jet.ranking import Order, Ranking

logger = logging.getLogger(__name__)


class Classification(str, Enum):
    PRINCIPAL = "Principal"
    PARAMETRIC = "Parametric"


@dataclass(frozen=True)
class Equation:
    lead: Coordinate
    component: Expr
    coefficient: Expr
    rhs: Expr


@dataclass
class Violation:
    condition: int
    equation: int
    message: str


@dataclass
class ValidationReport:
    violations: List[Violation] = field(default_factory=list)

    @property
    def valid(self) -> bool:
        return not self.violations

    def lines(self) -> List[str]:
        if self.valid:
            return ["orthonomic: conditions 1-3 hold"]
        return [
            f"condition {v.condition}, equation {v.equation + 1}: {v.message}"
            for v in self.violations
        ]


def solve_for_lead(space: JetSpace, component: Expr, lead: Coordinate) -> Tuple[Expr, Expr]:
    """Split A = c·lead + R and return (c, ω = −R/c)."""
    lead_sym = space.symbol(lead)
    coefficient = canonicalize(sympy.diff(component, lead_sym))
    if coefficient == 0:
        raise InvalidSystem(f"{space.name(lead)} does not occur in {print_expr(component)}")
    if lead_sym in coefficient.free_symbols:
        raise InvalidSystem(
            f"{print_expr(component)} is not linear in its lead {space.name(lead)}"
        )
    # A is affine in its lead, so R is A with the lead set to zero
    at_zero = canonicalize(component).xreplace({lead_sym: 0})
    remainder = canonicalize(sympy.expand(at_zero))
    return coefficient, canonicalize(-remainder / coefficient)


class PdeSystem:
    """Immutable orthonomic system over one kind of coordinate.

    ``kind`` is ``"jet"`` for systems in the dependent variables and
    ``"arbitrary"`` for constraint systems on the arbitrary functions g^r.
    """

    def __init__(
        self,
        space: JetSpace,
        equations: Sequence[Equation],
        ranking: Optional[Ranking] = None,
        syzygies: Sequence = (),
        max_depth: int = 64,
        kind: str = "jet",
        memoize: bool = True,
    ):
        self.space = space
        self.equations: Tuple[Equation, ...] = tuple(equations)
        self.ranking = ranking or Ranking(space)
        self.syzygies = tuple(syzygies)
        self.max_depth = max_depth
        self.kind = kind
        self.memoize = memoize
        self._derived: Dict[Tuple[int, MultiIndex], Expr] = {}
        self._values: Dict[Tuple[Coordinate, bool], Expr] = {}
        self._a_symbols: Dict[Tuple[int, MultiIndex], Symbol] = {}
        self._a_lookup: Dict[Symbol, Tuple[int, MultiIndex]] = {}
        self._lock = threading.RLock()

    @classmethod
    def from_components(
        cls,
        space: JetSpace,
        components: Sequence[Expr],
        ranking: Optional[Ranking] = None,
        leads: Optional[Sequence[Optional[Coordinate]]] = None,
        solved: Optional[Sequence[Optional[Expr]]] = None,
        syzygies: Sequence = (),
        max_depth: int = 64,
        kind: str = "jet",
    ) -> "PdeSystem":
        """Build a system from components A_µ as written.

        ``solved[µ]`` is the right-hand side of an equation written ``lead = rhs``;
        it is kept verbatim. Other equations get ω by solving for the lead and
        reducing against the remaining equations.
        """
        ranking = ranking or Ranking(space)
        leads = list(leads or [None] * len(components))
        solved = list(solved or [None] * len(components))
        equations: List[Equation] = []
        general: List[int] = []
        for mu, component in enumerate(components):
            component = sympy.sympify(component)
            lead = leads[mu]
            if lead is None:
                coords = [
                    space.coordinate(s) for s in space.coordinate_symbols(component, (kind,))
                ]
                lead = ranking.highest(coords)  # type: ignore[arg-type]
                if lead is None:
                    raise InvalidSystem(
                        f"equation {mu + 1} has no {kind} variable: {print_expr(component)}"
                    )
            coefficient, rhs = solve_for_lead(space, component, lead)
            if solved[mu] is not None:
                rhs = canonicalize(solved[mu])
            else:
                general.append(mu)
            equations.append(Equation(lead, canonicalize(component), coefficient, rhs))

        system = cls(space, equations, ranking, syzygies, max_depth, kind)
        if general and len(equations) > 1:
            reduced = list(equations)
            for mu in general:
                others = cls(
                    space,
                    [eq for nu, eq in enumerate(equations) if nu != mu],
                    ranking,
                    max_depth=max_depth,
                    kind=kind,
                )
                eq = equations[mu]
                reduced[mu] = Equation(
                    eq.lead, eq.component, eq.coefficient, others.normal_form(eq.rhs)
                )
            system = cls(space, reduced, ranking, syzygies, max_depth, kind)
        return system

    # -- accessors --------------------------------------------------------------

    @property
    def components(self) -> List[Expr]:
        return [eq.component for eq in self.equations]

    @property
    def leads(self) -> List[Coordinate]:
        return [eq.lead for eq in self.equations]

    def __len__(self) -> int:
        return len(self.equations)

    def describe(self) -> List[str]:
        return [
            f"{self.space.name(eq.lead)} = {print_expr(eq.rhs)}" for eq in self.equations
        ]

    # -- classification ---------------------------------------------------------

    def match(self, coord: Coordinate) -> Optional[Tuple[int, MultiIndex]]:
        """First equation (declaration order) whose lead has ``coord`` as derivative."""
        for mu, eq in enumerate(self.equations):
            if (
                type(eq.lead) is type(coord)
                and eq.lead.base == coord.base
                and eq.lead.idx.le(coord.idx)
            ):
                return mu, coord.idx - eq.lead.idx
        return None

    def classify(self, coord: Coordinate) -> Classification:
        if self.match(coord) is None:
            return Classification.PARAMETRIC
        return Classification.PRINCIPAL

    def validate_orthonomic(self) -> ValidationReport:
        report = ValidationReport()
        names = self.space.name
        for mu, eq in enumerate(self.equations):
            for sym in self.space.coordinate_symbols(eq.rhs, (self.kind,)):
                coord = self.space.coordinate(sym)
                if self.ranking.compare(coord, eq.lead) != Order.LT:  # type: ignore[arg-type]
                    report.violations.append(
                        Violation(1, mu, f"{sym} does not rank below {names(eq.lead)}")
                    )
        for mu, eq in enumerate(self.equations):
            for nu, other in enumerate(self.equations):
                if mu != nu and (
                    type(other.lead) is type(eq.lead)
                    and other.lead.base == eq.lead.base
                    and eq.lead.idx.le(other.lead.idx)
                ):
                    report.violations.append(
                        Violation(
                            2,
                            nu,
                            f"{names(other.lead)} is {names(eq.lead)} or a derivative of it",
                        )
                    )
        for nu, eq in enumerate(self.equations):
            for sym in self.space.coordinate_symbols(eq.rhs, (self.kind,)):
                found = self.match(self.space.coordinate(sym))  # type: ignore[arg-type]
                if found is not None:
                    report.violations.append(
                        Violation(
                            3,
                            nu,
                            f"right-hand side contains {sym}, a derivative of "
                            f"{names(self.equations[found[0]].lead)}",
                        )
                    )
        return report

    # -- principal substitution ------------------------------------------------

    def a_symbol(self, mu: int, idx: MultiIndex) -> Symbol:
        """Placeholder for D_K A_µ in characteristic coordinates."""
        key = (mu, idx)
        sym = self._a_symbols.get(key)
        if sym is None:
            suffix = self.space.suffix(idx)
            sym = Dummy(f"A{mu + 1}{'_' + suffix if suffix else ''}")
            with self._lock:
                sym = self._a_symbols.setdefault(key, sym)
                self._a_lookup[sym] = key
        return sym

    def a_index(self, sym: Symbol) -> Optional[Tuple[int, MultiIndex]]:
        return self._a_lookup.get(sym)

    def derived_component(self, mu: int, idx: MultiIndex) -> Expr:
        """Canonical D_K A_µ."""
        key = (mu, idx)
        cached = self._derived.get(key)
        if cached is not None:
            return cached
        if idx.is_zero():
            value = self.equations[mu].component
        else:
            i = idx.directions()[-1]
            lower = self.derived_component(mu, idx - MultiIndex.unit(self.space.n, i))
            value = canonicalize(self.space.total_derivative(lower, i))
        with self._lock:
            self._derived[key] = value
        return value

    def _principal_value(
        self, coord: Coordinate, use_a: bool, depth: int, active: Set[Coordinate]
    ) -> Expr:
        key = (coord, use_a)
        if self.memoize and key in self._values:
            return self._values[key]
        if depth > self.max_depth:
            raise InvalidSystem(
                f"principal substitution exceeded depth {self.max_depth} at "
                f"{self.space.name(coord)}"
            )
        if coord in active:
            raise InvalidSystem(f"cyclic reduction through {self.space.name(coord)}")
        mu, idx = self.match(coord)  # type: ignore[misc]
        derived = self.derived_component(mu, idx)
        sym = self.space.symbol(coord)
        coefficient = canonicalize(sympy.diff(derived, sym))
        if coefficient == 0 or sym in coefficient.free_symbols:
            raise InvalidSystem(
                f"D_K A_{mu + 1} is not quasi-linear in {self.space.name(coord)}"
            )
        remainder = canonicalize(sympy.expand(derived.xreplace({sym: 0})))
        placeholder = self.a_symbol(mu, idx) if use_a else sympy.S.Zero
        value = (placeholder - remainder) / coefficient
        value = self._reduce(value, use_a, depth + 1, active | {coord})
        if self.memoize:
            with self._lock:
                self._values[key] = value
        return value

    def _reduce(self, e: Expr, use_a: bool, depth: int, active: Set[Coordinate]) -> Expr:
        e = sympy.sympify(e)
        mapping = {}
        for sym in self.space.coordinate_symbols(e, (self.kind,)):
            coord = self.space.coordinate(sym)
            if self.match(coord) is not None:  # type: ignore[arg-type]
                mapping[sym] = self._principal_value(coord, use_a, depth, active)  # type: ignore[arg-type]
        if mapping:
            e = e.xreplace(mapping)
        return canonicalize(e)

    def normal_form(self, e: Expr) -> Expr:
        """f|₀: every principal derivative replaced, recursively, by its value on solutions."""
        return self._reduce(e, False, 0, frozenset())  # type: ignore[arg-type]

    def principal_substitution(self, e: Expr) -> Expr:
        """Express ``e`` in parametric derivatives and the placeholders a_{µK}."""
        return self._reduce(e, True, 0, frozenset())  # type: ignore[arg-type]

    def restricted_is_zero(
        self, e: Expr, settings: Optional[EngineSettings] = None
    ) -> Verdict:
        """Zero test of ``e`` on all solutions of the system."""
        return is_zero(self.normal_form(e), settings, self.space.functions)


def reduce_modulo(
    e: Expr, systems: Sequence[Optional[PdeSystem]]
) -> Expr:
    """Normal form with respect to several independent systems (u-system, g-system)."""
    for system in systems:
        if system is not None and len(system):
            e = system.normal_form(e)
    return canonicalize(e)
