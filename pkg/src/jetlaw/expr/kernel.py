"""
Canonical forms and substitution for differential-algebra expressions.

Canonical form: kernel arguments (elementary and opaque function arguments,
non-integer power bases) are canonicalised first, then the expression is brought
to a reduced rational form over its generators with exponentials of sums split so
that exp(2u - v) and exp(u) share generators. Repeating until nothing changes
lets sympy's automatic power rules (sqrt(a)**2 -> a) finish cancellations. A
denominator made only of exponentials is multiplied back into the terms, so
u_xt - exp(2u - v) prints as written rather than over exp(v).
"""

import logging
from typing import Dict, Iterable, Mapping

import sympy
from sympy import Derivative, Expr, Function, Pow

from jetlaw.expr.jetspace import JetSpace, MultiIndex

logger = logging.getLogger(__name__)

_MAX_PASSES = 6


def _canonical_arguments(e: Expr) -> Expr:
    if e.is_Atom or isinstance(e, Derivative):
        return e
    if isinstance(e, Function):
        return e.func(*[canonicalize(a) for a in e.args])
    if e.is_Pow and not e.exp.is_Integer:
        return Pow(canonicalize(e.base), canonicalize(e.exp))
    return e.func(*[_canonical_arguments(a) for a in e.args])


def _rational_pass(e: Expr) -> Expr:
    return sympy.cancel(sympy.expand(e))


def _exponential_denominator(e: Expr) -> bool:
    _, den = sympy.fraction(e)
    if den == 1:
        return False
    for factor in sympy.Mul.make_args(den):
        base = factor.base if factor.is_Pow else factor
        if not (factor.is_Number or isinstance(base, sympy.exp)):
            return False
    return True


def canonicalize(e: Expr) -> Expr:
    """Canonical representative of ``e``; semantically equal inputs that differ by
    rational-function algebra over the same kernels map to the same output."""
    e = sympy.sympify(e)
    if e.is_Atom:
        return e
    current = _canonical_arguments(e)
    for _ in range(_MAX_PASSES):
        reduced = _rational_pass(current)
        if reduced == current:
            break
        current = reduced
    else:
        logger.debug("canonicalize: no fixed point after %d passes", _MAX_PASSES)
    if _exponential_denominator(current):
        current = sympy.expand(current)
    return sympy.powsimp(current, combine="exp")


def is_canonical_zero(e: Expr) -> bool:
    return canonicalize(e) == 0


def substitute(e: Expr, mapping: Mapping[sympy.Basic, Expr]) -> Expr:
    """Simultaneous substitution followed by canonicalisation."""
    return canonicalize(sympy.sympify(e).xreplace(dict(mapping)))


def total_derivative(space: JetSpace, e: Expr, i: int) -> Expr:
    """Canonical D_i e."""
    return canonicalize(space.total_derivative(e, i))


def total_derivative_multi(space: JetSpace, e: Expr, idx: MultiIndex) -> Expr:
    """Canonical D_K e = D_{k1} D_{k2} ... e."""
    for i in idx.directions():
        e = canonicalize(space.total_derivative(e, i))
    return sympy.sympify(e)


def jet_order(space: JetSpace, e: Expr) -> int:
    """Highest derivative order among the dependent-variable jets of ``e``."""
    orders = [space.coordinate(s).order for s in space.jet_symbols(e)]  # type: ignore[union-attr]
    return max(orders, default=0)


def free_of(space: JetSpace, e: Expr, kinds: Iterable[str]) -> bool:
    return not space.coordinate_symbols(e, kinds)


def linear_coefficients(e: Expr, symbols: Iterable[sympy.Symbol]) -> Dict[sympy.Symbol, Expr]:
    """Coefficients of an expression known to be linear and homogeneous in ``symbols``."""
    return {s: canonicalize(sympy.diff(e, s)) for s in symbols}


def partial(space: JetSpace, e: Expr, var) -> Expr:
    """Canonical ∂e/∂var for a coordinate, an independent name or a symbol.

    Jet coordinates are independent of each other and of x, so ∂/∂x is the
    explicit dependence only.
    """
    if isinstance(var, str):
        symbol = space.indep(var) if var in space.independents else space.symbol(
            space.parse_name(var)  # type: ignore[arg-type]
        )
    elif isinstance(var, sympy.Symbol):
        symbol = var
    else:
        symbol = space.symbol(var)
    return canonicalize(sympy.diff(e, symbol))
