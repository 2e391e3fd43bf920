"""
Expression grammar of problem files.

pyparsing builds a small syntax tree; ``ExpressionBuilder`` turns it into sympy
against a JetSpace, so one grammar object serves every problem.
"""

import logging
from dataclasses import dataclass, field
from typing import Callable, Dict, List, Mapping, Optional

import pyparsing as pp
import sympy
from sympy import Expr

from jetlaw.core.errors import ParseError, UndeclaredSymbol
from jetlaw.expr.jetspace import JetSpace
from jetlaw.expr.kernel import total_derivative_multi

logger = logging.getLogger(__name__)

pp.ParserElement.enable_packrat()

ELEMENTARY: Dict[str, Callable[[Expr], Expr]] = {
    "exp": sympy.exp,
    "ln": sympy.log,
    "log": sympy.log,
    "sqrt": sympy.sqrt,
    "atan": sympy.atan,
    "sin": sympy.sin,
    "cos": sympy.cos,
    "tan": sympy.tan,
}


@dataclass
class Node:
    kind: str
    value: str = ""
    children: List["Node"] = field(default_factory=list)
    loc: int = 0


def _number(s, loc, toks):
    return Node("num", toks[0], loc=loc)


def _name(s, loc, toks):
    return Node("name", toks[0], loc=loc)


def _call(s, loc, toks):
    return Node("call", toks[0], list(toks[1:]), loc=loc)


def _derivative(s, loc, toks):
    return Node("D", toks[0][2:], [toks[1]], loc=loc)


def _power(s, loc, toks):
    items = list(toks[0])
    node = items[-1]
    for base in reversed(items[:-1:2]):
        node = Node("pow", children=[base, node], loc=base.loc)
    return node


def _unary(s, loc, toks):
    sign, operand = toks[0][0], toks[0][1]
    return operand if sign == "+" else Node("neg", children=[operand], loc=loc)


def _left_fold(s, loc, toks):
    items = list(toks[0])
    node = items[0]
    for op, rhs in zip(items[1::2], items[2::2]):
        node = Node(op, children=[node, rhs], loc=node.loc)
    return node


def _build_grammar() -> pp.ParserElement:
    expr = pp.Forward()
    lpar, rpar = pp.Suppress("("), pp.Suppress(")")
    number = pp.Regex(r"\d+\.\d*|\.\d+|\d+").set_parse_action(_number)
    name = pp.Regex(r"[A-Za-z][A-Za-z0-9_]*").set_parse_action(_name)
    fname = pp.Regex(r"[A-Za-z][A-Za-z0-9]*'*") + pp.FollowedBy("(")
    call = (fname + lpar + pp.DelimitedList(expr) + rpar).set_parse_action(_call)
    primary = pp.Forward()
    dname = pp.Regex(r"D_[a-z]+")
    derivative = (dname + ((lpar + expr + rpar) | primary)).set_parse_action(_derivative)
    primary <<= derivative | call | number | name
    expr <<= pp.infix_notation(
        primary,
        [
            (pp.Literal("^"), 2, pp.OpAssoc.RIGHT, _power),
            (pp.one_of("+ -"), 1, pp.OpAssoc.RIGHT, _unary),
            (pp.one_of("* /"), 2, pp.OpAssoc.LEFT, _left_fold),
            (pp.one_of("+ -"), 2, pp.OpAssoc.LEFT, _left_fold),
        ],
    )
    return expr


EXPRESSION = _build_grammar()


def parse_tree(text: str, line: int = 0, column: int = 0) -> Node:
    """Syntax tree of one expression; ``line``/``column`` locate it in its file."""
    try:
        return EXPRESSION.parse_string(text, parse_all=True)[0]
    except pp.ParseException as exc:
        raise ParseError(
            f"cannot parse expression '{text}'", line, column + exc.col - 1
        ) from None


class ExpressionBuilder:
    """Evaluates syntax trees to sympy in the namespace of a problem."""

    def __init__(
        self,
        space: JetSpace,
        names: Optional[Mapping[str, Expr]] = None,
        line: int = 0,
        column: int = 0,
    ):
        self.space = space
        self.names = dict(names or {})
        self.line = line
        self.column = column

    def parse(self, text: str) -> Expr:
        return self.build(parse_tree(text, self.line, self.column))

    def _undeclared(self, node: Node) -> UndeclaredSymbol:
        return UndeclaredSymbol(node.value, self.line, self.column + node.loc)

    def build(self, node: Node) -> Expr:
        kind = node.kind
        if kind == "num":
            return sympy.Rational(node.value)
        if kind == "name":
            return self._resolve(node)
        if kind == "call":
            return self._call(node)
        if kind == "D":
            try:
                idx = self.space.index(node.value)
            except KeyError:
                raise self._undeclared(Node("name", f"D_{node.value}", loc=node.loc))
            return total_derivative_multi(self.space, self.build(node.children[0]), idx)
        args = [self.build(c) for c in node.children]
        if kind == "neg":
            return -args[0]
        if kind == "pow":
            return args[0] ** args[1]
        if kind == "*":
            return args[0] * args[1]
        if kind == "/":
            if args[1] == 0:
                raise ParseError("division by zero", self.line, self.column + node.loc)
            return args[0] / args[1]
        if kind == "+":
            return args[0] + args[1]
        if kind == "-":
            return args[0] - args[1]
        raise ParseError(f"unexpected syntax node {kind}", self.line, self.column)

    def _resolve(self, node: Node) -> Expr:
        name = node.value
        if name in self.names:
            return self.names[name]
        space = self.space
        if name in space.independents:
            return space.indep(name)
        if name in space.constants:
            return space.constants[name]
        if name == "pi":
            return sympy.pi
        coord = space.parse_name(name)
        if coord is not None:
            return space.value(coord)
        raise self._undeclared(node)

    def _call(self, node: Node) -> Expr:
        head = node.value
        base = head.rstrip("'")
        order = len(head) - len(base)
        args = [self.build(c) for c in node.children]
        space = self.space
        if base in ELEMENTARY and not order:
            if len(args) != 1:
                raise ParseError(f"{base} takes one argument", self.line, self.column + node.loc)
            return ELEMENTARY[base](args[0])
        if base in space.functions:
            if len(args) != 1:
                raise ParseError(f"{base} takes one argument", self.line, self.column + node.loc)
            return space.functions.apply(base, args[0], order)
        if base in space.unknowns and not order:
            if len(args) != len(space.unknowns[base]):
                raise ParseError(
                    f"{base} takes {len(space.unknowns[base])} arguments",
                    self.line,
                    self.column + node.loc,
                )
            return space.unknown_function(base)(*args)
        raise self._undeclared(Node("name", base, loc=node.loc))


def parse_expression(
    space: JetSpace,
    text: str,
    names: Optional[Mapping[str, Expr]] = None,
    line: int = 0,
    column: int = 0,
) -> Expr:
    return ExpressionBuilder(space, names, line, column).parse(text)
