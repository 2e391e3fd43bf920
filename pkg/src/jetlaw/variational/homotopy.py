"""
Flux reconstruction by the scale homotopy v ↦ λv, and inverse total derivatives.

For a divergence e, F^j = ∫₀¹ Σ_α Σ_J Σ_{K ≤ J−e_j} c(J, K, j) · u^α_K ·
(−D)_{J−K−e_j} (∂e/∂u^α_J)[λu] dλ, with the multinomial weight
c = (|K|!/K!)·((|J|−|K|−1)!/(J−K−e_j)!) / (|J|!/J!). When only some
directions are used, derivatives in the remaining directions are separate
fibre variables. The explicit part e(x, [0]) is integrated in one direction.
"""

import logging
from math import factorial
from typing import Dict, List, Mapping, Optional, Sequence

import sympy
from sympy import Dummy, Expr, Symbol

from jetlaw.core.config_helpers import EngineSettings
from jetlaw.core.errors import (
    FluxReconstructionFailed,
    HomotopySingular,
    NotExactDerivative,
)
from jetlaw.expr.jetspace import JetSpace, JetVar, MultiIndex, field_antiderivative
from jetlaw.expr.kernel import canonicalize, total_derivative_multi
from jetlaw.expr.zero_test import is_zero
from jetlaw.variational.operators import FluxVector

logger = logging.getLogger(__name__)


def _restrict(idx: MultiIndex, directions: Sequence[int]) -> MultiIndex:
    return MultiIndex(
        tuple(c if i in directions else 0 for i, c in enumerate(idx.counts))
    )


def _weight(j_idx: MultiIndex, k_idx: MultiIndex, j: int, n: int) -> sympy.Rational:
    rest = j_idx - k_idx - MultiIndex.unit(n, j)
    numerator = sympy.Rational(factorial(k_idx.order), k_idx.factorial()) * sympy.Rational(
        factorial(j_idx.order - k_idx.order - 1), rest.factorial()
    )
    return numerator / sympy.Rational(factorial(j_idx.order), j_idx.factorial())


def _integrate_unit(integrand: Expr, lam: Symbol) -> Expr:
    """∫₀¹ integrand dλ, exactly."""
    integrand = sympy.expand(integrand)
    try:
        poly = sympy.Poly(integrand, lam)
    except sympy.PolynomialError:
        poly = None
    if poly is not None:
        return sum(
            (c / (k[0] + 1) for k, c in poly.terms()), sympy.S.Zero
        )
    return _integrate_fallback(integrand, lam)


def _integrate_fallback(integrand: Expr, lam: Symbol) -> Expr:
    symbols = sorted(integrand.free_symbols - {lam}, key=str)
    reals = {s: Dummy(s.name, real=True) for s in symbols if not s.is_real}
    back = {v: k for k, v in reals.items()}
    logger.debug("homotopy: non-polynomial λ-dependence, trying symbolic integration")
    try:
        result = sympy.integrate(integrand.xreplace(reals), (lam, 0, 1), conds="none")
    except (NotImplementedError, ValueError, TypeError) as e:
        raise HomotopySingular(f"λ-integral not available: {e}")
    result = sympy.piecewise_fold(result)
    if isinstance(result, sympy.Piecewise):
        result = result.args[0].expr
    if result.has(sympy.Integral) or result.has(sympy.oo, -sympy.oo, sympy.zoo, sympy.nan):
        raise HomotopySingular("homotopy integrand is singular or not integrable")
    return result.xreplace(back)


def _explicit_part(
    space: JetSpace, f0: Expr, directions: Sequence[int]
) -> Optional[Dict[int, Expr]]:
    """Flux for the pure function e(x, [0]) along one of ``directions``."""
    f0 = canonicalize(f0)
    if f0 == 0:
        return {}
    for j in directions:
        x = space.indep_symbols[j]
        total = sympy.S.Zero
        for term in sympy.Add.make_args(sympy.expand(f0)):
            fields = space.coordinate_symbols(term, ("field",))
            if not fields:
                piece = sympy.integrate(term, x)
                if piece.has(sympy.Integral):
                    break
                total += piece
                continue
            if len(fields) != 1:
                break
            atom = fields[0]
            coefficient = canonicalize(term / atom)
            anti = field_antiderivative(space, atom, j)
            if anti is None or atom in coefficient.free_symbols or coefficient.has(x):
                break
            total += coefficient * anti
        else:
            return {j: total}
    return None


def homotopy_fluxes(
    space: JetSpace,
    e: Expr,
    deps: Optional[Sequence[str]] = None,
    directions: Optional[Sequence[int]] = None,
    basepoint: Optional[Mapping[str, Expr]] = None,
    settings: Optional[EngineSettings] = None,
) -> FluxVector:
    """Fluxes F with Div F = e for a divergence ``e``; post-verified.

    Args:
        space: Jet space of ``e``
        e: Expression assumed to be a divergence in ``directions``
        deps: Variables scaled by the homotopy (default: all dependents)
        directions: Independent indices carrying fluxes (default: all)
        basepoint: Constant shift v₀ per dependent for the affine homotopy
        settings: Probe settings for the final zero test

    Raises:
        HomotopySingular: If the λ-integral or the explicit part cannot be done
        FluxReconstructionFailed: If the fluxes do not reproduce ``e``
    """
    deps = list(deps if deps is not None else space.dependents)
    dirs = sorted(directions if directions is not None else range(space.n))
    e = canonicalize(e)
    original = e
    if e == 0:
        return FluxVector.zero(space.n)

    offsets = {
        space.symbol(JetVar(dep, MultiIndex.zero(space.n))): sympy.sympify(v0)
        for dep, v0 in (basepoint or {}).items()
    }
    if offsets:
        e = canonicalize(e.xreplace({s: s + v0 for s, v0 in offsets.items()}))

    lam = Dummy("lam")
    fibre = [
        s for s in space.coordinate_symbols(e, ("jet", "arbitrary"))
        if space.coordinate(s).base in deps  # type: ignore[union-attr]
    ]
    scale = {s: lam * s for s in fibre}
    integrands: List[Expr] = [sympy.S.Zero] * space.n

    for sym in fibre:
        coord = space.coordinate(sym)
        j_idx = _restrict(coord.idx, dirs)  # type: ignore[union-attr]
        if j_idx.is_zero():
            continue
        rest = coord.idx - j_idx  # type: ignore[union-attr]
        partial = sympy.diff(e, sym)
        if partial == 0:
            continue
        scaled = partial.xreplace(scale)
        for j in dirs:
            if j_idx.counts[j] == 0:
                continue
            top = j_idx - MultiIndex.unit(space.n, j)
            for k_idx in top.below():
                outer = top - k_idx
                sign = -1 if outer.order % 2 else 1
                factor = space.symbol(type(coord)(coord.base, k_idx + rest))  # type: ignore[union-attr]
                integrands[j] += (
                    _weight(j_idx, k_idx, j, space.n)
                    * sign
                    * factor
                    * total_derivative_multi(space, scaled, outer)
                )

    components = [
        _integrate_unit(integrand, lam) if integrand != 0 else sympy.S.Zero
        for integrand in integrands
    ]

    f0 = e.xreplace({s: 0 for s in fibre})
    explicit = _explicit_part(space, f0, dirs)
    if explicit is None:
        raise HomotopySingular("explicit part e(x,[0]) has no closed-form antiderivative")
    for j, piece in explicit.items():
        components[j] += piece

    if offsets:
        components = [
            c.xreplace({s: s - v0 for s, v0 in offsets.items()}) for c in components
        ]
    fluxes = FluxVector.of(components)
    divergence = sum(
        (space.total_derivative(fluxes.components[j], j) for j in dirs), sympy.S.Zero
    )
    verdict = is_zero(divergence - original, settings, space.functions)
    if not verdict.holds:
        raise FluxReconstructionFailed(
            f"homotopy fluxes do not reproduce the divergence ({verdict.value})"
        )
    return fluxes


def invert_total_derivative(
    space: JetSpace,
    e: Expr,
    i: int,
    deps: Optional[Sequence[str]] = None,
    settings: Optional[EngineSettings] = None,
) -> Expr:
    """λ with D_i λ = e, by the one-direction homotopy; post-verified.

    Raises:
        NotExactDerivative: If D_i λ − e does not vanish
    """
    try:
        flux = homotopy_fluxes(space, e, deps, directions=[i], settings=settings)
    except (HomotopySingular, FluxReconstructionFailed) as exc:
        raise NotExactDerivative(f"no D_{space.independents[i]}-antiderivative: {exc}")
    return flux.components[i]
