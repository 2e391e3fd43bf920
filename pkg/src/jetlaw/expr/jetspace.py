"""
Jet coordinates and the JetSpace that owns their sympy symbols.

A jet variable u^α_J is represented by a plain sympy Symbol named ``u_xt``
(suffix letters in declared independent order). The JetSpace maps symbols back
to structured coordinates and knows how each coordinate shifts under D_i.
"""

import logging
import math
import re
from dataclasses import dataclass, field
from typing import Dict, Iterable, List, Mapping, Optional, Sequence, Tuple, Union

import sympy
from sympy import Expr, Symbol

from jetlaw.core.errors import InvalidSystem
from jetlaw.expr.opaque import OpaqueRegistry

logger = logging.getLogger(__name__)

_NAME = re.compile(r"^[A-Za-z][A-Za-z0-9]*$")


@dataclass(frozen=True, order=True)
class MultiIndex:
    """Derivative counts J = (j_1, ..., j_n) over the declared independents."""

    counts: Tuple[int, ...]

    @classmethod
    def zero(cls, n: int) -> "MultiIndex":
        return cls((0,) * n)

    @classmethod
    def unit(cls, n: int, i: int) -> "MultiIndex":
        return cls(tuple(1 if k == i else 0 for k in range(n)))

    @classmethod
    def from_directions(cls, n: int, directions: Iterable[int]) -> "MultiIndex":
        counts = [0] * n
        for i in directions:
            counts[i] += 1
        return cls(tuple(counts))

    @property
    def order(self) -> int:
        return sum(self.counts)

    def is_zero(self) -> bool:
        return self.order == 0

    def __add__(self, other: "MultiIndex") -> "MultiIndex":
        return MultiIndex(tuple(a + b for a, b in zip(self.counts, other.counts)))

    def __sub__(self, other: "MultiIndex") -> "MultiIndex":
        diff = tuple(a - b for a, b in zip(self.counts, other.counts))
        if any(d < 0 for d in diff):
            raise ValueError(f"{other} is not below {self}")
        return MultiIndex(diff)

    def le(self, other: "MultiIndex") -> bool:
        """Componentwise K ≤ J."""
        return all(a <= b for a, b in zip(self.counts, other.counts))

    def directions(self) -> List[int]:
        """Direction indices with multiplicity, e.g. (2, 1) -> [0, 0, 1]."""
        out: List[int] = []
        for i, c in enumerate(self.counts):
            out.extend([i] * c)
        return out

    def factorial(self) -> int:
        result = 1
        for c in self.counts:
            result *= math.factorial(c)
        return result

    def below(self) -> List["MultiIndex"]:
        """All K with K ≤ self."""
        out = [MultiIndex(())]
        for c in self.counts:
            out = [MultiIndex(k.counts + (j,)) for k in out for j in range(c + 1)]
        return out


@dataclass(frozen=True)
class _Coordinate:
    base: str
    idx: MultiIndex

    kind = "coordinate"

    @property
    def order(self) -> int:
        return self.idx.order

    def shifted(self, idx: MultiIndex) -> "_Coordinate":
        return type(self)(self.base, self.idx + idx)


@dataclass(frozen=True)
class JetVar(_Coordinate):
    """u^α_J: derivative of a dependent variable."""

    kind = "jet"

    @property
    def dep(self) -> str:
        return self.base


@dataclass(frozen=True)
class ArbFnVar(_Coordinate):
    """g^r_J: derivative of an arbitrary function of the independents."""

    kind = "arbitrary"

    @property
    def fn(self) -> str:
        return self.base


@dataclass(frozen=True)
class FieldVar(_Coordinate):
    """Partial derivative of a given field of some independents."""

    kind = "field"


Coordinate = Union[JetVar, ArbFnVar, FieldVar]


@dataclass
class FieldSpec:
    """A given function of a subset of the independents.

    ``relations`` maps a multi-index R to an expression for the R-th partial, so
    ``Phi_y = kappa`` lets every derivative above R be computed from the relation.
    """

    name: str
    args: Tuple[str, ...]
    relations: Dict[MultiIndex, Expr] = field(default_factory=dict)


class JetSpace:
    """Declared variables of a problem and the symbols standing for their jets."""

    def __init__(
        self,
        independents: Sequence[str],
        dependents: Sequence[str],
        arbitrary: Sequence[str] = (),
        fields: Sequence[FieldSpec] = (),
        constants: Sequence[str] = (),
        functions: Optional[OpaqueRegistry] = None,
        unknowns: Optional[Mapping[str, Sequence[str]]] = None,
        positive: Iterable[str] = (),
    ):
        self.independents: Tuple[str, ...] = tuple(independents)
        self.dependents: Tuple[str, ...] = tuple(dependents)
        self.arbitrary: Tuple[str, ...] = tuple(arbitrary)
        self.fields: Dict[str, FieldSpec] = {f.name: f for f in fields}
        self.functions = functions if functions is not None else OpaqueRegistry()
        self.positive = frozenset(positive)
        self._validate_names(constants, unknowns or {})

        self.n = len(self.independents)
        self._symbols: Dict[Coordinate, Symbol] = {}
        self._coordinates: Dict[Symbol, Coordinate] = {}
        self.indep_symbols: Tuple[Symbol, ...] = tuple(
            self._plain_symbol(x) for x in self.independents
        )
        self.constants: Dict[str, Symbol] = {c: self._plain_symbol(c) for c in constants}
        self.unknowns: Dict[str, Tuple[str, ...]] = {
            name: tuple(args) for name, args in (unknowns or {}).items()
        }
        self._unknown_classes = {name: sympy.Function(name) for name in self.unknowns}
        self._shift_cache: Dict[Tuple[Symbol, int], Expr] = {}

    def _validate_names(
        self, constants: Sequence[str], unknowns: Mapping[str, Sequence[str]]
    ) -> None:
        if not self.independents:
            raise InvalidSystem("at least one independent variable is required")
        for x in self.independents:
            if not re.fullmatch(r"[a-z]", x):
                raise InvalidSystem(f"independent variable '{x}' must be one letter")
        if len(set(self.independents)) != len(self.independents):
            raise InvalidSystem("independent variables must be distinct")
        names = (
            list(self.dependents)
            + list(self.arbitrary)
            + list(self.fields)
            + list(constants)
            + list(unknowns)
            + list(self.functions.names)
        )
        for name in names:
            if not _NAME.match(name):
                raise InvalidSystem(f"invalid name '{name}' (letters and digits only)")
        seen = set(self.independents)
        for name in names:
            if name in seen:
                raise InvalidSystem(f"name '{name}' declared twice")
            seen.add(name)
        for spec in self.fields.values():
            for arg in spec.args:
                if arg not in self.independents:
                    raise InvalidSystem(
                        f"field {spec.name} depends on undeclared variable '{arg}'"
                    )
        for name, args in unknowns.items():
            for arg in args:
                if arg not in self.independents and arg not in self.dependents:
                    raise InvalidSystem(
                        f"unknown function {name} depends on undeclared '{arg}'"
                    )

    def _plain_symbol(self, name: str) -> Symbol:
        if name in self.positive:
            return Symbol(name, positive=True)
        return Symbol(name)

    def derived(
        self,
        independents: Sequence[str],
        dependents: Sequence[str],
        positive: Iterable[str] = (),
    ) -> "JetSpace":
        """A space over new variables sharing fields, constants and functions."""
        return JetSpace(
            independents,
            dependents,
            arbitrary=self.arbitrary,
            fields=[
                f for f in self.fields.values() if set(f.args) <= set(independents)
            ],
            constants=list(self.constants),
            functions=self.functions,
            unknowns={},
            positive=positive,
        )

    # -- naming -----------------------------------------------------------------

    def suffix(self, idx: MultiIndex) -> str:
        return "".join(x * c for x, c in zip(self.independents, idx.counts))

    def name(self, coord: Coordinate) -> str:
        if coord.idx.is_zero():
            return coord.base
        return f"{coord.base}_{self.suffix(coord.idx)}"

    def index(self, suffix: str) -> MultiIndex:
        """Multi-index for derivative letters given in any order."""
        counts = [0] * self.n
        for letter in suffix:
            if letter not in self.independents:
                raise KeyError(letter)
            counts[self.independents.index(letter)] += 1
        return MultiIndex(tuple(counts))

    def parse_name(self, name: str) -> Optional[Coordinate]:
        """Coordinate named ``base`` or ``base_letters``; None if not a jet name."""
        base, _, suffix = name.partition("_")
        if "_" in suffix:
            return None
        try:
            idx = self.index(suffix)
        except KeyError:
            return None
        if base in self.dependents:
            return JetVar(base, idx)
        if base in self.arbitrary:
            return ArbFnVar(base, idx)
        if base in self.fields:
            allowed = self.fields[base].args
            if any(
                c and x not in allowed for x, c in zip(self.independents, idx.counts)
            ):
                return None
            return FieldVar(base, idx)
        return None

    # -- symbols ----------------------------------------------------------------

    def symbol(self, coord: Coordinate) -> Symbol:
        sym = self._symbols.get(coord)
        if sym is None:
            if coord.base not in self.dependents + self.arbitrary and not (
                coord.base in self.fields
            ):
                raise KeyError(f"undeclared variable '{coord.base}'")
            sym = self._plain_symbol(self.name(coord))
            self._symbols[coord] = sym
            self._coordinates[sym] = coord
        return sym

    def value(self, coord: Coordinate) -> Expr:
        """Symbol for a coordinate, or its declared value for related field partials."""
        if isinstance(coord, FieldVar):
            spec = self.fields[coord.base]
            for rel_idx, rel_expr in spec.relations.items():
                if rel_idx.le(coord.idx):
                    return self.total_derivative_multi(rel_expr, coord.idx - rel_idx)
        return self.symbol(coord)

    def jet(self, dep: str, suffix: str = "") -> Symbol:
        coord = self.parse_name(f"{dep}_{suffix}" if suffix else dep)
        if coord is None:
            raise KeyError(f"not a jet name: {dep}_{suffix}")
        return self.symbol(coord)

    def coordinate(self, sym: sympy.Basic) -> Optional[Coordinate]:
        return self._coordinates.get(sym)  # type: ignore[arg-type]

    def indep(self, name: str) -> Symbol:
        return self.indep_symbols[self.independents.index(name)]

    def unknown_function(self, name: str) -> sympy.FunctionClass:
        return self._unknown_classes[name]

    def coordinate_symbols(self, e: Expr, kinds: Iterable[str] = ()) -> List[Symbol]:
        """Coordinate symbols of ``e``, optionally restricted to some kinds, sorted."""
        wanted = set(kinds)
        out = []
        for sym in e.free_symbols:
            coord = self._coordinates.get(sym)  # type: ignore[arg-type]
            if coord is not None and (not wanted or coord.kind in wanted):
                out.append(sym)
        return sorted(out, key=lambda s: (self._coordinates[s].order, s.name))

    def jet_symbols(self, e: Expr) -> List[Symbol]:
        return self.coordinate_symbols(e, ("jet",))

    # -- total derivatives ------------------------------------------------------

    def shift(self, sym: Symbol, i: int) -> Expr:
        """D_i applied to a single coordinate symbol."""
        key = (sym, i)
        cached = self._shift_cache.get(key)
        if cached is not None:
            return cached
        coord = self._coordinates[sym]
        if isinstance(coord, FieldVar):
            if self.independents[i] not in self.fields[coord.base].args:
                result: Expr = sympy.S.Zero
            else:
                result = self.value(coord.shifted(MultiIndex.unit(self.n, i)))
        else:
            result = self.symbol(coord.shifted(MultiIndex.unit(self.n, i)))
        self._shift_cache[key] = result
        return result

    def total_derivative(self, e: Expr, i: int) -> Expr:
        """D_i e = ∂e/∂x^i + Σ_J u_{J+e_i} ∂e/∂u_J (unsimplified)."""
        e = sympy.sympify(e)
        result = sympy.diff(e, self.indep_symbols[i])
        for sym in self.coordinate_symbols(e):
            partial = sympy.diff(e, sym)
            if partial != 0:
                result += self.shift(sym, i) * partial
        return result

    def total_derivative_multi(self, e: Expr, idx: MultiIndex) -> Expr:
        for i in idx.directions():
            e = self.total_derivative(e, i)
        return e

    def __repr__(self) -> str:
        return (
            f"JetSpace(independents={self.independents}, dependents={self.dependents}, "
            f"arbitrary={self.arbitrary})"
        )


def field_antiderivative(space: JetSpace, sym: Symbol, i: int) -> Optional[Expr]:
    """An expression whose D_i is the field atom ``sym``, if one is declared.

    ``kappa_y`` integrates to ``kappa`` in y; ``kappa`` integrates to ``Phi`` when
    the relation ``Phi_y = kappa`` was declared.
    """
    coord = space.coordinate(sym)
    if not isinstance(coord, FieldVar):
        return None
    if coord.idx.counts[i] > 0:
        return space.symbol(FieldVar(coord.base, coord.idx - MultiIndex.unit(space.n, i)))
    unit = MultiIndex.unit(space.n, i)
    for spec in space.fields.values():
        for rel_idx, rel_expr in spec.relations.items():
            if rel_idx == unit and rel_expr == sym:
                return space.symbol(FieldVar(spec.name, MultiIndex.zero(space.n)))
    return None
