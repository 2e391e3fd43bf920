"""
The bridge between multipliers with constrained arbitrary functions and
λ-families: verification of E_{g^r}(Q·A) + Σ_l (𝒟ˡ_r)† λ_l = 0, solving it for
single-derivative constraints, building C_λ, syzygies and first integrals.
"""

import logging
from dataclasses import dataclass, field
from typing import Dict, List, Optional, Sequence, Tuple

import sympy
from sympy import Expr

from jetlaw.core.config_helpers import EngineSettings
from jetlaw.core.errors import (
    FluxReconstructionFailed,
    HomotopySingular,
    NotExactDerivative,
    ShapeMismatch,
    UnsupportedConstraintShape,
)
from jetlaw.expr.jetspace import ArbFnVar, JetSpace, MultiIndex
from jetlaw.expr.kernel import canonicalize, total_derivative_multi
from jetlaw.expr.opaque import OpaqueApplication
from jetlaw.expr.zero_test import Verdict, is_zero
from jetlaw.jet.system import PdeSystem, reduce_modulo
from jetlaw.claws.conservation import characteristic_form, constraint_system
from jetlaw.claws.model import (
    ConservationLaw,
    ConstraintSet,
    LambdaSolution,
    Multiplier,
)
from jetlaw.variational.homotopy import homotopy_fluxes, invert_total_derivative
from jetlaw.variational.operators import FluxVector, LinDiffOp, euler

logger = logging.getLogger(__name__)


def _source_multiplier(
    sys: PdeSystem,
    constraints: ConstraintSet,
    cl: Optional[ConservationLaw],
    multiplier: Optional[Multiplier],
    settings: Optional[EngineSettings],
) -> Multiplier:
    gsys = constraint_system(sys, constraints)
    if multiplier is None:
        if cl is None:
            raise ShapeMismatch("a conservation law or a multiplier is required")
        multiplier = characteristic_form(sys, cl, constraints, settings).multiplier
    return Multiplier.of([reduce_modulo(q, [gsys]) for q in multiplier.components])


def _euler_in_g(sys: PdeSystem, q: Multiplier) -> Dict[str, Expr]:
    product = q.dot(sys.components)
    return {g: euler(sys.space, product, g) for g in sys.space.arbitrary}


@dataclass
class BridgeResult:
    verdict: Verdict
    residuals: Dict[str, Expr] = field(default_factory=dict)


def bridge_verify(
    sys: PdeSystem,
    constraints: ConstraintSet,
    lam: Sequence[Expr],
    cl: Optional[ConservationLaw] = None,
    multiplier: Optional[Multiplier] = None,
    settings: Optional[EngineSettings] = None,
) -> BridgeResult:
    """Check E_{g^r}(Q·A) + Σ_l (𝒟ˡ_r)† λ_l = 0 for every r, identically in (x,[u])."""
    space = sys.space
    if len(lam) != len(constraints):
        raise ShapeMismatch(
            f"{len(lam)} λ components for {len(constraints)} constraint rows"
        )
    q = _source_multiplier(sys, constraints, cl, multiplier, settings)
    sources = _euler_in_g(sys, q)
    residuals = {}
    for r, g in enumerate(space.arbitrary):
        residual = sources[g]
        for l, row in enumerate(constraints.ops):
            if not row[r].is_zero():
                residual += row[r].adjoint(space).apply(space, lam[l])
        residuals[g] = canonicalize(residual)
    verdict = Verdict.conjunction(
        is_zero(res, settings, space.functions) for res in residuals.values()
    )
    return BridgeResult(verdict, residuals)


def solve_lambda(
    sys: PdeSystem,
    constraints: ConstraintSet,
    cl: Optional[ConservationLaw] = None,
    multiplier: Optional[Multiplier] = None,
    settings: Optional[EngineSettings] = None,
) -> LambdaSolution:
    """λ for constraint rows of the form a(x)·D_i g^r, one column per row.

    Raises:
        UnsupportedConstraintShape: For any other operator shape
        NotExactDerivative: If the Euler expression is not a matching divergence
    """
    space = sys.space
    q = _source_multiplier(sys, constraints, cl, multiplier, settings)
    sources = _euler_in_g(sys, q)
    components: List[Expr] = [sympy.S.Zero] * len(constraints)

    for l, row in enumerate(constraints.ops):
        touched = [r for r, op in enumerate(row) if not op.is_zero()]
        if len(touched) != 1 or row[touched[0]].single_derivative() is None:
            raise UnsupportedConstraintShape(
                f"constraint row {l + 1} is not a single derivative a(x)·D_i g"
            )

    for g in space.arbitrary:
        rows = constraints.rows_touching(g)
        if not rows:
            continue
        r = space.arbitrary.index(g)
        shapes = [constraints.ops[l][r].single_derivative() for l in rows]
        source = sources[g]
        # D_i(a·λ) = E_g(Q·A) when the adjoint term is moved across
        if len(rows) == 1:
            a, i = shapes[0]  # type: ignore[misc]
            product = invert_total_derivative(space, source, i, settings=settings)
            components[rows[0]] = canonicalize(product / a)
            continue
        directions = [i for _, i in shapes]  # type: ignore[misc]
        if len(set(directions)) != len(directions):
            raise UnsupportedConstraintShape(
                f"two rows constrain {g} in the same direction"
            )
        try:
            flux = homotopy_fluxes(
                space, source, directions=directions, settings=settings
            )
        except (HomotopySingular, FluxReconstructionFailed) as exc:
            raise NotExactDerivative(str(exc))
        for l, (a, i) in zip(rows, shapes):  # type: ignore[misc]
            components[l] = canonicalize(flux.components[i] / a)

    result = bridge_verify(sys, constraints, components, multiplier=q, settings=settings)
    if not result.verdict.holds:
        raise NotExactDerivative(f"recovered λ fails verification ({result.verdict.value})")
    return LambdaSolution(tuple(components), result.verdict)


def _pair_flux(space: JetSpace, p: Expr, g: Expr, idx: MultiIndex) -> List[Expr]:
    """Fluxes of P·D_K G − G·(−D)_K P, peeling one direction at a time."""
    flux = [sympy.S.Zero] * space.n
    current = p
    remaining = idx
    while not remaining.is_zero():
        i = remaining.directions()[0]
        remaining = remaining - MultiIndex.unit(space.n, i)
        flux[i] += current * total_derivative_multi(space, g, remaining)
        current = -space.total_derivative(current, i)
    return flux


def construct_c_lambda(
    space: JetSpace, constraints: ConstraintSet, lam: Sequence[Expr], name: str = "C_lambda"
) -> ConservationLaw:
    """C_λ = λ_l 𝒟ˡ_r g^r − g^r (𝒟ˡ_r)† λ_l with closed-form fluxes."""
    flux = [sympy.S.Zero] * space.n
    for l, row in enumerate(constraints.ops):
        for r, op in enumerate(row):
            g = space.symbol(ArbFnVar(space.arbitrary[r], MultiIndex.zero(space.n)))
            for a, idx in op.terms:
                for i, piece in enumerate(_pair_flux(space, a * lam[l], g, idx)):
                    flux[i] += piece
    return ConservationLaw(FluxVector.of(flux), name)


@dataclass
class Syzygy:
    """Σ_µ ops^µ(A_µ) + extra(D_K A) = target, with ``extra`` over placeholders."""

    ops: Tuple[LinDiffOp, ...]
    extra: Expr = sympy.S.Zero
    target: Expr = sympy.S.Zero


def syzygy_from_expression(
    sys: PdeSystem, placeholder_space: JetSpace, relation: Expr, target: Expr = 0
) -> Syzygy:
    """Split a relation written in A1, A2, … jets into its linear operators and the rest."""
    relation = canonicalize(relation)
    names = [f"A{mu + 1}" for mu in range(len(sys))]
    terms: Dict[int, list] = {mu: [] for mu in range(len(sys))}
    placeholders = {}
    linear = sympy.S.Zero
    zero_point = {}
    for sym in placeholder_space.coordinate_symbols(relation, ("jet",)):
        coord = placeholder_space.coordinate(sym)
        if coord.base in names:  # type: ignore[union-attr]
            zero_point[sym] = 0
    for sym in zero_point:
        coord = placeholder_space.coordinate(sym)
        mu = names.index(coord.base)  # type: ignore[union-attr]
        coefficient = canonicalize(sympy.diff(relation, sym).xreplace(zero_point))
        if coefficient != 0:
            terms[mu].append((coefficient, coord.idx))  # type: ignore[union-attr]
            linear += coefficient * sym
        placeholders[sym] = sys.a_symbol(mu, coord.idx)  # type: ignore[union-attr]
    extra = canonicalize(relation - linear).xreplace(placeholders)
    ops = tuple(LinDiffOp.from_terms(terms[mu]) for mu in range(len(sys)))
    return Syzygy(ops, canonicalize(extra), canonicalize(target))


def verify_syzygy(
    sys: PdeSystem,
    ops: Sequence[LinDiffOp],
    extra: Expr = 0,
    target: Expr = 0,
    settings: Optional[EngineSettings] = None,
) -> Verdict:
    """Σ_µ ops^µ(A_µ) + extra − target vanishes identically in (x,[u])."""
    space = sys.space
    total = sympy.S.Zero
    for mu, op in enumerate(ops):
        total += op.apply(space, sys.components[mu])
    extra = sympy.sympify(extra)
    back = {
        a: sys.derived_component(*sys.a_index(a))  # type: ignore[misc]
        for a in extra.free_symbols
        if sys.a_index(a) is not None  # type: ignore[arg-type]
    }
    total += extra.xreplace(back) - target
    return is_zero(total, settings, space.functions)


@dataclass
class FirstIntegral:
    lam: Expr
    direction: int
    verdict: Verdict


def _constrained_along(constraints: Optional[ConstraintSet], g: str, i: int) -> bool:
    """True when some row reads a(x)·D_i g = 0."""
    if constraints is None:
        return False
    r = constraints.space.arbitrary.index(g)
    for l in constraints.rows_touching(g):
        shape = constraints.ops[l][r].single_derivative()
        if shape is not None and shape[1] == i:
            return True
    return False


def _flux_factor(
    space: JetSpace, flux: Expr, i: int, constraints: Optional[ConstraintSet]
) -> Expr:
    """λ in F^i = g·λ, where g does not depend on x^i."""
    arbitrary = space.coordinate_symbols(flux, ("arbitrary",))
    if arbitrary:
        if len(arbitrary) != 1 or space.coordinate(arbitrary[0]).order:  # type: ignore[union-attr]
            raise ShapeMismatch("flux must be linear in one undifferentiated g")
        g_sym = arbitrary[0]
        g = space.coordinate(g_sym).base  # type: ignore[union-attr]
        lam = canonicalize(sympy.diff(flux, g_sym))
        if g_sym in lam.free_symbols or canonicalize(flux - g_sym * lam) != 0:
            raise ShapeMismatch("flux is not of the form g·λ")
        if not _constrained_along(constraints, g, i):
            raise ShapeMismatch(
                f"{g} is not constrained by D_{space.independents[i]} {g} = 0"
            )
        return lam
    x_i = space.indep_symbols[i]
    # canonical forms are expanded; pull the common factor back out
    for factor in sympy.Mul.make_args(sympy.factor_terms(canonicalize(flux))):
        if (
            isinstance(factor, OpaqueApplication)
            and factor.args[0] in space.indep_symbols
            and factor.args[0] != x_i
        ):
            lam = canonicalize(flux / factor)
            if not lam.has(factor):
                return lam
    raise ShapeMismatch("flux has no factor independent of its direction")


def first_integral(
    sys: PdeSystem,
    cl: ConservationLaw,
    constraints: Optional[ConstraintSet] = None,
    settings: Optional[EngineSettings] = None,
) -> FirstIntegral:
    """λ with D_i λ = 0 on solutions from a law D_i(g·λ) with g free of x^i."""
    if cl.fluxes is None:
        raise ShapeMismatch("first integrals need explicit fluxes")
    nonzero = cl.fluxes.nonzero()
    if len(nonzero) != 1:
        raise ShapeMismatch(f"expected one nonzero flux component, found {len(nonzero)}")
    i = nonzero[0]
    lam = _flux_factor(sys.space, cl.fluxes.components[i], i, constraints)
    verdict = sys.restricted_is_zero(sys.space.total_derivative(lam, i), settings)
    return FirstIntegral(lam, i, verdict)
