"""
Generalized symmetries by their characteristics Q: prolonged action, the
linearized symmetry condition, brackets, variational symmetries and the
Noether correspondence with conservation-law multipliers.
"""

import logging
from dataclasses import dataclass
from typing import Dict, Optional, Sequence, Tuple

import sympy
from sympy import Expr

from jetlaw.core.config_helpers import EngineSettings
from jetlaw.core.errors import ShapeMismatch
from jetlaw.expr.jetspace import JetSpace, JetVar, MultiIndex
from jetlaw.expr.kernel import canonicalize, total_derivative_multi
from jetlaw.expr.printing import print_expr
from jetlaw.expr.zero_test import Verdict
from jetlaw.jet.ranking import Ranking
from jetlaw.jet.system import PdeSystem, reduce_modulo
from jetlaw.claws.conservation import constraint_system, verify_multiplier
from jetlaw.claws.model import ConstraintSet, Multiplier
from jetlaw.variational.operators import euler_lagrange_system, is_divergence

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class Characteristic:
    components: Tuple[Expr, ...]
    name: str = ""

    @classmethod
    def of(cls, components: Sequence[Expr], name: str = "") -> "Characteristic":
        return cls(tuple(canonicalize(c) for c in components), name)

    def as_multiplier(self) -> Multiplier:
        return Multiplier.of(self.components, self.name)

    def describe(self, space: JetSpace) -> Dict[str, str]:
        return {f"Q_{u}": print_expr(q) for u, q in zip(space.dependents, self.components)}


def _check_shape(space: JetSpace, q: Characteristic) -> None:
    if len(q.components) != len(space.dependents):
        raise ShapeMismatch(
            f"characteristic has {len(q.components)} components for "
            f"{len(space.dependents)} dependent variables"
        )


def apply_prolonged(space: JetSpace, q: Characteristic, e: Expr) -> Expr:
    """X(e) = Σ D_J Q^α ∂e/∂u^α_J over the jets present in ``e``."""
    _check_shape(space, q)
    e = sympy.sympify(e)
    total = sympy.S.Zero
    for sym in space.jet_symbols(e):
        coord = space.coordinate(sym)
        partial = sympy.diff(e, sym)
        if partial == 0:
            continue
        alpha = space.dependents.index(coord.base)  # type: ignore[union-attr]
        total += total_derivative_multi(space, q.components[alpha], coord.idx) * partial  # type: ignore[union-attr]
    return canonicalize(total)


def check_symmetry(
    sys: PdeSystem,
    q: Characteristic,
    constraints: Optional[ConstraintSet] = None,
    settings: Optional[EngineSettings] = None,
) -> Verdict:
    """Linearized symmetry condition: X(A_µ) vanishes on solutions for every µ."""
    gsys = constraint_system(sys, constraints)
    verdicts = []
    for mu, component in enumerate(sys.components):
        image = reduce_modulo(apply_prolonged(sys.space, q, component), [gsys])
        verdict = sys.restricted_is_zero(image, settings)
        logger.debug("check_symmetry: equation %d -> %s", mu + 1, verdict.value)
        verdicts.append(verdict)
    return Verdict.conjunction(verdicts)


def characteristic_from_point(
    space: JetSpace, xi: Sequence[Expr], eta: Sequence[Expr], name: str = ""
) -> Characteristic:
    """Q^α = η^α − ξ^i u^α_i for a point symmetry generator ξ^i ∂_i + η^α ∂_α."""
    if len(xi) != space.n or len(eta) != len(space.dependents):
        raise ShapeMismatch(
            f"point generator needs {space.n} xi and {len(space.dependents)} eta components"
        )
    components = []
    for u, eta_u in zip(space.dependents, eta):
        q = sympy.sympify(eta_u)
        for i, xi_i in enumerate(xi):
            q -= sympy.sympify(xi_i) * space.symbol(JetVar(u, MultiIndex.unit(space.n, i)))
        components.append(q)
    return Characteristic.of(components, name)


def bracket(space: JetSpace, q1: Characteristic, q2: Characteristic) -> Characteristic:
    """[Q₁, Q₂]^α = X₁(Q₂^α) − X₂(Q₁^α)."""
    return Characteristic.of(
        [
            apply_prolonged(space, q1, b) - apply_prolonged(space, q2, a)
            for a, b in zip(q1.components, q2.components)
        ],
        f"[{q1.name},{q2.name}]",
    )


def check_variational(
    space: JetSpace,
    lagrangian: Expr,
    q: Characteristic,
    settings: Optional[EngineSettings] = None,
) -> Verdict:
    """X(L) is a total divergence."""
    return is_divergence(
        space, apply_prolonged(space, q, lagrangian), space.dependents, settings
    )


@dataclass
class NoetherReport:
    variational: Verdict
    multiplier: Verdict

    @property
    def agree(self) -> bool:
        return self.variational.holds == self.multiplier.holds

    @property
    def verdict(self) -> Verdict:
        """The shared verdict when both paths agree, otherwise Unknown."""
        if not self.agree:
            return Verdict.UNKNOWN
        return Verdict.conjunction([self.variational, self.multiplier])


def check_noether1(
    space: JetSpace,
    lagrangian: Expr,
    q: Characteristic,
    leads=None,
    ranking: Optional[Ranking] = None,
    settings: Optional[EngineSettings] = None,
) -> NoetherReport:
    """Variational symmetry test and multiplier test for the Euler-Lagrange system."""
    max_depth = settings.max_depth if settings is not None else 64
    system = euler_lagrange_system(space, lagrangian, leads, ranking, max_depth)
    report = NoetherReport(
        variational=check_variational(space, lagrangian, q, settings),
        multiplier=verify_multiplier(system, q.as_multiplier(), settings=settings),
    )
    if not report.agree:
        logger.warning(
            "Noether check disagreement: variational=%s multiplier=%s",
            report.variational.value,
            report.multiplier.value,
        )
    return report
