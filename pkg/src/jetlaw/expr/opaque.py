"""
Opaque unary functions: Ψ, M, g, ... known only by name, optionally through a
derivative rule such as ``Q2'(s) = Psi'(s)/M(s)``.

Each (name, order) pair becomes a dynamically created sympy Function class so
that sympy's differentiation, printing and substitution treat Ψ'(u) as an atom
whose derivative is Ψ''(u), unless a rule says otherwise.
"""

import logging
from dataclasses import dataclass
from typing import Dict, List, Optional, Tuple

import sympy
from sympy import Dummy, Expr

logger = logging.getLogger(__name__)


class OpaqueApplication(sympy.Function):
    """Base class of every generated opaque-function class."""

    nargs = 1
    _base: str = ""
    _order: int = 0
    _registry: "OpaqueRegistry"

    @classmethod
    def eval(cls, arg):  # noqa: D401 - sympy hook
        return None

    def fdiff(self, argindex=1):
        if argindex != 1:
            raise sympy.ArgumentIndexError(self, argindex)
        return self._registry.derivative(self._base, self._order + 1, self.args[0])

    @property
    def display_name(self) -> str:
        return self._base + "'" * self._order

    def _sympystr(self, printer):
        return f"{self.display_name}({printer._print(self.args[0])})"

    def _code_call(self, printer):
        return f"{type(self).__name__}({printer._print(self.args[0])})"

    _lambdacode = _code_call
    _pythoncode = _code_call
    _mpmathcode = _code_call
    _numpycode = _code_call


@dataclass
class OpaqueSpec:
    name: str
    rule: Optional[Expr] = None


class OpaqueRegistry:
    """Declared opaque functions and their generated classes."""

    def __init__(self) -> None:
        self.variable = Dummy("s")
        self.specs: Dict[str, OpaqueSpec] = {}
        self._classes: Dict[Tuple[str, int], type] = {}

    @property
    def names(self) -> List[str]:
        return list(self.specs)

    def __contains__(self, name: str) -> bool:
        return name in self.specs

    def declare(self, name: str) -> None:
        if name not in self.specs:
            self.specs[name] = OpaqueSpec(name)

    def set_rule(self, name: str, rule: Expr) -> None:
        """Declare F'(s) = rule, with rule written in ``self.variable``."""
        self.declare(name)
        self.specs[name].rule = sympy.sympify(rule)
        logger.debug("Derivative rule for %s: %s", name, rule)

    def rule(self, name: str) -> Optional[Expr]:
        return self.specs[name].rule

    def function(self, name: str, order: int = 0) -> type:
        """Class for the ``order``-th derivative of ``name`` (no rule applied)."""
        if name not in self.specs:
            raise KeyError(f"undeclared function '{name}'")
        key = (name, order)
        cls = self._classes.get(key)
        if cls is None:
            class_name = name if order == 0 else f"{name}__d{order}"
            namespace = {"_base": name, "_order": order, "_registry": self}
            cls = type(OpaqueApplication)(class_name, (OpaqueApplication,), namespace)
            self._classes[key] = cls
        return cls

    def derivative(self, name: str, order: int, arg: Expr) -> Expr:
        """F^(order)(arg), expanded through the rule when one is declared."""
        rule = self.specs[name].rule
        if rule is not None and order >= 1:
            s = self.variable
            value = sympy.diff(rule, s, order - 1) if order > 1 else rule
            return value.xreplace({s: arg})
        return self.function(name, order)(arg)

    def apply(self, name: str, arg: Expr, order: int = 0) -> Expr:
        """Parser entry point: ``name`` with ``order`` primes applied to ``arg``."""
        if order == 0:
            return self.function(name, 0)(arg)
        return self.derivative(name, order, arg)

    @staticmethod
    def identify(e: sympy.Basic) -> Optional[Tuple[str, int]]:
        if isinstance(e, OpaqueApplication):
            return e._base, e._order
        return None

    def base_names_without_rule(self) -> List[str]:
        return sorted(n for n, spec in self.specs.items() if spec.rule is None)
