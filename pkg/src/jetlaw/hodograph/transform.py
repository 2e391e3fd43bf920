"""
Single-pair hodograph transformations u ↔ x^i.

The old total derivatives are rewritten through the new ones,

    D_x = (1/x_u) D̃_u,        D_p = D̃_p − (x_p/x_u) D̃_u   (p passive),

so the table of old jets in new coordinates follows order by order. Laws
transform as C̃ = 𝒥⁻¹C with 𝒥 = det(D_j x̃^i) = u_x.
"""

import logging
from dataclasses import dataclass, field
from typing import Dict, List, Optional, Tuple

import sympy
from sympy import Expr, Symbol

from jetlaw.core.config_helpers import EngineSettings
from jetlaw.core.errors import (
    FluxReconstructionFailed,
    HomotopySingular,
    OrderTooHigh,
    ShapeMismatch,
)
from jetlaw.expr.jetspace import JetSpace, JetVar, MultiIndex
from jetlaw.expr.kernel import canonicalize
from jetlaw.expr.printing import print_expr
from jetlaw.expr.zero_test import is_zero
from jetlaw.jet.system import PdeSystem
from jetlaw.claws.model import ConservationLaw
from jetlaw.variational.homotopy import homotopy_fluxes
from jetlaw.variational.operators import FluxVector

logger = logging.getLogger(__name__)

ORDER_CAP = 4


@dataclass
class HodographMap:
    """Swap of dependent ``dependent`` with independent ``independent``."""

    old: JetSpace
    new: JetSpace
    dependent: str
    independent: str
    max_order: int = 3
    side_conditions: List[str] = field(default_factory=list)
    _table: Dict[Symbol, Expr] = field(default_factory=dict, repr=False)

    @property
    def position(self) -> int:
        return self.old.independents.index(self.independent)

    @property
    def renames(self) -> Dict[str, str]:
        return {self.independent: self.dependent, self.dependent: self.independent}

    def _new_jet(self, name: str, idx: MultiIndex) -> Symbol:
        return self.new.symbol(JetVar(name, idx))

    def _old_derivative(self, e: Expr, i: int) -> Expr:
        """Old D_i of an expression written in new coordinates."""
        n = self.new.n
        swapped = self.position
        x_u = self._new_jet(self.independent, MultiIndex.unit(n, swapped))
        along_u = self.new.total_derivative(e, swapped)
        if i == swapped:
            return canonicalize(along_u / x_u)
        x_p = self._new_jet(self.independent, MultiIndex.unit(n, i))
        return canonicalize(self.new.total_derivative(e, i) - x_p / x_u * along_u)

    def entry(self, sym: Symbol) -> Expr:
        """New-coordinate value of an old jet symbol."""
        cached = self._table.get(sym)
        if cached is not None:
            return cached
        coord = self.old.coordinate(sym)
        if not isinstance(coord, JetVar):
            raise ShapeMismatch(f"{sym} is not a jet of a dependent variable")
        if coord.order > self.max_order:
            raise OrderTooHigh(
                f"{sym} has order {coord.order} above the map order {self.max_order}"
            )
        if coord.idx.is_zero():
            if coord.base == self.dependent:
                value: Expr = self.new.indep_symbols[self.position]
            else:
                value = self._new_jet(coord.base, MultiIndex.zero(self.new.n))
        else:
            i = coord.idx.directions()[-1]
            lower = self.old.symbol(JetVar(coord.base, coord.idx - MultiIndex.unit(self.old.n, i)))
            value = self._old_derivative(self.entry(lower), i)
        self._table[sym] = value
        return value

    def table(self) -> Dict[str, str]:
        """Printable table of every old jet up to ``max_order``."""
        out = {}
        for u in self.old.dependents:
            for idx in _indices(self.old.n, self.max_order):
                sym = self.old.symbol(JetVar(u, idx))
                out[self.old.name(JetVar(u, idx))] = print_expr(self.entry(sym))
        return out


def _indices(n: int, max_order: int) -> List[MultiIndex]:
    out = [MultiIndex.zero(n)]
    frontier = [MultiIndex.zero(n)]
    for _ in range(max_order):
        nxt = []
        for idx in frontier:
            for i in range(n):
                shifted = idx + MultiIndex.unit(n, i)
                if shifted not in nxt:
                    nxt.append(shifted)
        out.extend(nxt)
        frontier = nxt
    return out


def build_map(space: JetSpace, dependent: str, independent: str, max_order: int = 3) -> HodographMap:
    """Swap a dependent variable with an independent one; other variables are passive.

    Raises:
        OrderTooHigh: If ``max_order`` exceeds the implementation cap
        ShapeMismatch: If the names are not a dependent and an independent of ``space``
    """
    if max_order > ORDER_CAP:
        raise OrderTooHigh(f"hodograph order {max_order} exceeds the cap {ORDER_CAP}")
    if dependent not in space.dependents or independent not in space.independents:
        raise ShapeMismatch(f"cannot swap {dependent} <-> {independent}")
    if len(dependent) != 1:
        raise ShapeMismatch(f"{dependent} must be a one-letter name to become independent")
    for spec in space.fields.values():
        if independent in spec.args:
            raise ShapeMismatch(
                f"field {spec.name} depends on {independent}; swapping it is unsupported"
            )
    position = space.independents.index(independent)
    independents = list(space.independents)
    independents[position] = dependent
    dependents = [independent if u == dependent else u for u in space.dependents]
    first = f"{independent}_{dependent}"
    new = space.derived(independents, dependents, positive=[first])
    condition = f"{dependent}_{independent} != 0 (taken as {first} > 0)"
    logger.debug("hodograph map %s <-> %s up to order %d", dependent, independent, max_order)
    return HodographMap(space, new, dependent, independent, max_order, [condition])


def inverse_map(hmap: HodographMap) -> HodographMap:
    """The map swapping back; the new space of ``hmap`` becomes the old one."""
    inverse = build_map(hmap.new, hmap.independent, hmap.dependent, hmap.max_order)
    inverse.new = hmap.old
    inverse._table.clear()
    return inverse


def transform_expr(hmap: HodographMap, e: Expr) -> Expr:
    """Rewrite ``e`` from old into new jet coordinates."""
    e = sympy.sympify(e)
    if hmap.old.coordinate_symbols(e, ("arbitrary",)):
        raise ShapeMismatch("arbitrary functions cannot be carried through a hodograph map")
    mapping = {sym: hmap.entry(sym) for sym in hmap.old.jet_symbols(e)}
    mapping[hmap.old.indep_symbols[hmap.position]] = hmap._new_jet(
        hmap.independent, MultiIndex.zero(hmap.new.n)
    )
    return canonicalize(e.xreplace(mapping))


def jacobian(hmap: HodographMap) -> Expr:
    """𝒥 = det(D_j x̃^i) in old coordinates."""
    old = hmap.old
    new_in_old = [
        old.symbol(JetVar(hmap.dependent, MultiIndex.zero(old.n)))
        if k == hmap.position
        else old.indep_symbols[k]
        for k in range(old.n)
    ]
    matrix = sympy.Matrix(
        old.n, old.n, lambda i, j: old.total_derivative(new_in_old[i], j)
    )
    return canonicalize(matrix.det())


def transform_system(hmap: HodographMap, sys: PdeSystem) -> PdeSystem:
    """The system in new coordinates, re-solved for its highest new-ranked jets."""
    components = [transform_expr(hmap, a) for a in sys.components]
    ranking = sys.ranking.with_independents(hmap.new, hmap.renames)
    return PdeSystem.from_components(
        hmap.new, components, ranking, max_depth=sys.max_depth
    )


def _piola_fluxes(hmap: HodographMap, fluxes: FluxVector, j_inv: Expr) -> List[Expr]:
    """F̃^k = 𝒥⁻¹ Σ_i (D_i x̃^k) F^i, transformed."""
    old = hmap.old
    u = old.symbol(JetVar(hmap.dependent, MultiIndex.zero(old.n)))
    out = []
    for k in range(old.n):
        if k == hmap.position:
            combined = sum(
                (old.total_derivative(u, i) * f for i, f in enumerate(fluxes.components)),
                sympy.S.Zero,
            )
        else:
            combined = fluxes.components[k]
        out.append(transform_expr(hmap, j_inv * combined))
    return out


@dataclass
class TransformedLaw:
    law: ConservationLaw
    divergence: Expr
    side_conditions: List[str]
    reconstruction: str


def transform_cl(
    hmap: HodographMap,
    cl: ConservationLaw,
    settings: Optional[EngineSettings] = None,
) -> TransformedLaw:
    """C̃ = 𝒥⁻¹C in new coordinates, with fluxes when they can be recovered.

    Fluxes of a law given by fluxes come from the Piola identity; otherwise the
    homotopy operator in the new variables is tried. A law whose fluxes cannot be
    recovered is returned by its divergence.
    """
    j_inv = 1 / jacobian(hmap)
    target = transform_expr(hmap, j_inv * cl.divergence(hmap.old))
    name = f"{cl.name}~" if cl.name else "transformed"
    try:
        law, how = _reconstruct(hmap, cl, j_inv, target, settings)
    except FluxReconstructionFailed as exc:
        logger.info("transform_cl: %s; keeping the divergence only", exc)
        law, how = ConservationLaw.from_divergence(target, name), "divergence"
    law = ConservationLaw(law.fluxes, name, law.divergence_expr)
    return TransformedLaw(law, target, list(hmap.side_conditions), how)


def _reconstruct(
    hmap: HodographMap,
    cl: ConservationLaw,
    j_inv: Expr,
    target: Expr,
    settings: Optional[EngineSettings],
) -> Tuple[ConservationLaw, str]:
    candidates = []
    if cl.fluxes is not None:
        candidates.append(("piola", lambda: FluxVector.of(_piola_fluxes(hmap, cl.fluxes, j_inv))))
    candidates.append(
        ("homotopy", lambda: homotopy_fluxes(hmap.new, target, settings=settings))
    )
    for how, build in candidates:
        try:
            fluxes = build()
        except (HomotopySingular, FluxReconstructionFailed, ShapeMismatch) as exc:
            logger.debug("transform_cl: %s reconstruction failed (%s)", how, exc)
            continue
        if is_zero(fluxes.divergence(hmap.new) - target, settings, hmap.new.functions).holds:
            return ConservationLaw(fluxes), how
        logger.debug("transform_cl: %s fluxes do not reproduce the divergence", how)
    raise FluxReconstructionFailed("no flux reconstruction reproduces the divergence")
