"""
Rankings: total orders on jet coordinates satisfying the positivity conditions
u ≺ u_J (J ≠ 0) and u_I ≺ v_J ⟹ D_K u_I ≺ D_K v_J.
"""

from enum import Enum
from typing import Callable, Iterable, Optional, Sequence, Tuple

from jetlaw.core.errors import InvalidSystem
from jetlaw.expr.jetspace import Coordinate, JetSpace


class Order(int, Enum):
    LT = -1
    EQ = 0
    GT = 1


class Ranking:
    """Orderly (grlex) or elimination (lex) ranking with declared variable orders.

    Priority lists are written highest first: ``independent=("t", "x")`` ranks
    t-derivatives above x-derivatives.
    """

    def __init__(
        self,
        space: JetSpace,
        strategy: str = "grlex",
        independent: Optional[Sequence[str]] = None,
        dependent: Optional[Sequence[str]] = None,
        key: Optional[Callable[[Coordinate], Tuple]] = None,
    ):
        self.space = space
        self.strategy = strategy
        self.independent = tuple(independent or space.independents)
        self.dependent = tuple(dependent or space.dependents)
        if sorted(self.independent) != sorted(space.independents):
            raise InvalidSystem(
                f"ranking must order all independents {space.independents}"
            )
        if sorted(self.dependent) != sorted(space.dependents):
            raise InvalidSystem(f"ranking must order all dependents {space.dependents}")
        if strategy not in ("grlex", "lex", "custom"):
            raise InvalidSystem(f"unknown ranking strategy '{strategy}'")
        if strategy == "custom" and key is None:
            raise InvalidSystem("custom ranking needs a key function")
        self._custom = key
        self._positions = [space.independents.index(x) for x in self.independent]
        bases = list(self.dependent) + list(space.arbitrary) + list(space.fields)
        self._base_rank = {b: len(bases) - k for k, b in enumerate(bases)}

    def key(self, coord: Coordinate) -> Tuple:
        if self._custom is not None:
            return self._custom(coord)
        counts = tuple(coord.idx.counts[p] for p in self._positions)
        base = self._base_rank.get(coord.base, 0)
        if self.strategy == "lex":
            return (counts, base)
        return (coord.order, base, counts)

    def compare(self, a: Coordinate, b: Coordinate) -> Order:
        ka, kb = self.key(a), self.key(b)
        if ka == kb:
            return Order.EQ
        return Order.GT if ka > kb else Order.LT

    def highest(self, coords: Iterable[Coordinate]) -> Optional[Coordinate]:
        return max(coords, key=self.key, default=None)

    def with_independents(self, space: JetSpace, renames: dict) -> "Ranking":
        """Same strategy over a space whose variables were renamed (hodograph)."""
        return Ranking(
            space,
            self.strategy if self.strategy != "custom" else "grlex",
            [renames.get(x, x) for x in self.independent],
            [renames.get(u, u) for u in self.dependent],
        )

    def describe(self) -> str:
        return (
            f"{self.strategy}; independent {' > '.join(self.independent)}; "
            f"dependent {' > '.join(self.dependent)}"
        )
