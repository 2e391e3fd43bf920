"""
Conservation-law verification, characteristic form, multipliers, triviality
and determining equations.
"""

import logging
import warnings
from typing import Dict, List, Optional, Sequence, Tuple

import sympy
from sympy import Expr
from sympy.core.function import AppliedUndef

from jetlaw.core.config_helpers import EngineSettings
from jetlaw.core.errors import SyzygyRedundancy
from jetlaw.core.logging_manager import log_event
from jetlaw.expr.kernel import canonicalize, total_derivative_multi
from jetlaw.expr.opaque import OpaqueApplication
from jetlaw.expr.zero_test import Verdict, is_zero
from jetlaw.jet.system import PdeSystem, reduce_modulo
from jetlaw.claws.model import (
    CharacteristicForm,
    ConservationLaw,
    ConstraintSet,
    Multiplier,
)
from jetlaw.variational.operators import euler

logger = logging.getLogger(__name__)


def constraint_system(
    sys: PdeSystem, constraints: Optional[ConstraintSet]
) -> Optional[PdeSystem]:
    if constraints is None or not len(constraints):
        return None
    gsys = constraints.system(sys.ranking, sys.max_depth)
    report = gsys.validate_orthonomic()  # type: ignore[union-attr]
    if not report.valid:
        log_event(logger, "constraints_not_orthonomic", violations=report.lines())
    return gsys


def verify_cl(
    sys: PdeSystem,
    cl: ConservationLaw,
    constraints: Optional[ConstraintSet] = None,
    settings: Optional[EngineSettings] = None,
) -> Verdict:
    """Div F vanishes on solutions (after imposing the g-constraints)."""
    divergence = cl.divergence(sys.space)
    reduced = reduce_modulo(divergence, [constraint_system(sys, constraints), sys])
    return is_zero(reduced, settings, sys.space.functions)


def _sequential_coefficients(e: Expr, placeholders: Sequence[sympy.Symbol]) -> Dict[sympy.Symbol, Expr]:
    """f_k with E(a) − E(0) = Σ a_k f_k, f_k depending on a_1..a_k only."""
    coefficients = {}
    previous = e.xreplace({a: 0 for a in placeholders})
    for k, a in enumerate(placeholders):
        current = e.xreplace({b: 0 for b in placeholders[k + 1 :]})
        coefficients[a] = canonicalize((current - previous) / a)
        previous = current
    return coefficients


def characteristic_form(
    sys: PdeSystem,
    cl: ConservationLaw,
    constraints: Optional[ConstraintSet] = None,
    settings: Optional[EngineSettings] = None,
) -> CharacteristicForm:
    """Multiplier Q with Div F ≃ Q·A, found by integrating the A-coordinate form by parts."""
    space = sys.space
    if sys.syzygies:
        warnings.warn(
            "declared syzygies make the characteristic form non-unique",
            SyzygyRedundancy,
        )
        logger.warning("characteristic_form: system declares syzygies")
    gsys = constraint_system(sys, constraints)
    divergence = reduce_modulo(cl.divergence(space), [gsys])
    in_a = sys.principal_substitution(divergence)

    placeholders = sorted(
        (s for s in in_a.free_symbols if sys.a_index(s) is not None),  # type: ignore[arg-type]
        key=lambda s: (sys.a_index(s)[0], sys.a_index(s)[1].order, sys.a_index(s)[1]),  # type: ignore[index]
    )
    remainder = is_zero(in_a.xreplace({a: 0 for a in placeholders}), settings, space.functions)
    back = {a: sys.derived_component(*sys.a_index(a)) for a in placeholders}  # type: ignore[misc]

    components: List[Expr] = [sympy.S.Zero] * len(sys)
    for a, f in _sequential_coefficients(in_a, placeholders).items():
        mu, idx = sys.a_index(a)  # type: ignore[misc]
        f = canonicalize(f.xreplace(back))
        sign = -1 if idx.order % 2 else 1
        components[mu] += sign * total_derivative_multi(space, f, idx)
    components = [reduce_modulo(q, [gsys]) for q in components]
    multiplier = Multiplier.of(components, cl.name)

    restricted = tuple(reduce_modulo(q, [gsys, sys]) for q in multiplier.components)
    residual = multiplier.dot(sys.components) - divergence
    check = Verdict.conjunction(
        is_zero(reduce_modulo(euler(space, residual, u), [gsys]), settings, space.functions)
        for u in space.dependents
    )
    logger.debug("characteristic_form: remainder=%s check=%s", remainder.value, check.value)
    return CharacteristicForm(multiplier, restricted, remainder, check)


def free_arbitrary(
    space_arbitrary: Sequence[str], constraints: Optional[ConstraintSet]
) -> List[str]:
    if constraints is None:
        return list(space_arbitrary)
    return [g for g in space_arbitrary if constraints.is_free(g)]


def verify_multiplier(
    sys: PdeSystem,
    q: Multiplier,
    constraints: Optional[ConstraintSet] = None,
    settings: Optional[EngineSettings] = None,
) -> Verdict:
    """Q·A is a divergence (free arbitrary functions count as Euler variables)."""
    space = sys.space
    gsys = constraint_system(sys, constraints)
    reduced = Multiplier.of([reduce_modulo(c, [gsys]) for c in q.components])
    product = reduced.dot(sys.components)
    present = {
        space.coordinate(s).base  # type: ignore[union-attr]
        for s in space.coordinate_symbols(product, ("arbitrary",))
    }
    variables = list(space.dependents) + [
        g for g in free_arbitrary(space.arbitrary, constraints) if g in present
    ]
    return Verdict.conjunction(
        is_zero(reduce_modulo(euler(space, product, v), [gsys]), settings, space.functions)
        for v in variables
    )


def is_trivial(
    sys: PdeSystem,
    cl: ConservationLaw,
    constraints: Optional[ConstraintSet] = None,
    settings: Optional[EngineSettings] = None,
) -> Verdict:
    """Holds (ProvedZero/ProbablyZero) when the law is trivial.

    Trivial means Q|₀ = 0, or the law is a family in free arbitrary functions whose
    every E_{g^r}(Q·A) vanishes identically (triviality induced by a syzygy).
    """
    space = sys.space
    form = characteristic_form(sys, cl, constraints, settings)
    restricted = Verdict.conjunction(
        is_zero(q, settings, space.functions) for q in form.restricted
    )
    if restricted.holds:
        return restricted
    product = form.multiplier.dot(sys.components)
    present = {
        space.coordinate(s).base  # type: ignore[union-attr]
        for s in space.coordinate_symbols(product, ("arbitrary",))
    }
    free = [g for g in free_arbitrary(space.arbitrary, constraints) if g in present]
    if free:
        induced = Verdict.conjunction(
            is_zero(euler(space, product, g), settings, space.functions) for g in free
        )
        if induced.holds:
            logger.debug("is_trivial: syzygy-induced triviality in %s", free)
            return induced
    return restricted


def equivalent(
    sys: PdeSystem,
    cl1: ConservationLaw,
    cl2: ConservationLaw,
    constraints: Optional[ConstraintSet] = None,
    settings: Optional[EngineSettings] = None,
) -> Verdict:
    return is_trivial(sys, cl1.minus(sys.space, cl2), constraints, settings)


def _function_argument_symbols(e: Expr) -> set:
    inside = set()
    for node in sympy.preorder_traversal(e):
        if isinstance(node, (AppliedUndef, OpaqueApplication, sympy.Derivative)):
            inside |= node.free_symbols
        elif isinstance(node, sympy.Function):
            inside |= node.free_symbols
        elif node.is_Pow and not node.exp.is_Integer:
            inside |= node.free_symbols
    return inside


def determining_equations(sys: PdeSystem, q_ansatz: Multiplier) -> List[Expr]:
    """E_{u^α}(Q·A) split by monomials in the jet variables free of the ansatz."""
    space = sys.space
    product = q_ansatz.dot(sys.components)
    equations: List[Expr] = []
    for u in space.dependents:
        e = euler(space, product, u)
        if e == 0:
            continue
        numerator = canonicalize(sympy.numer(sympy.together(e)))
        gens = [
            s for s in space.jet_symbols(numerator)
            if s not in _function_argument_symbols(numerator)
        ]
        try:
            coefficients = sympy.Poly(numerator, *gens).coeffs() if gens else [numerator]
        except sympy.PolynomialError:
            logger.debug("determining_equations: no monomial split for E_%s", u)
            coefficients = [numerator]
        for c in coefficients:
            c = canonicalize(c)
            if c != 0 and c not in equations and -c not in equations:
                equations.append(c)
    return equations


def check_candidate(
    equations: Sequence[Expr],
    unknown: sympy.FunctionClass,
    arguments: Sequence[sympy.Symbol],
    candidate: Expr,
    settings: Optional[EngineSettings] = None,
    registry=None,
) -> Verdict:
    """Substitute a candidate solution for the unknown function into every equation."""
    solution = sympy.Lambda(tuple(arguments), candidate)
    return Verdict.conjunction(
        is_zero(canonicalize(eq.subs(unknown, solution).doit()), settings, registry)
        for eq in equations
    )
