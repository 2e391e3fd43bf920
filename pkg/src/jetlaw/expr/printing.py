"""Text form of expressions, readable back by the problem-file parser."""

from sympy import Expr
from sympy.printing.str import StrPrinter


class JetPrinter(StrPrinter):
    """StrPrinter with ``^`` for powers and ``ln`` for natural logarithms."""

    def _print_Pow(self, expr, rational=False):
        return super()._print_Pow(expr, rational).replace("**", "^")

    def _print_log(self, expr):
        return "ln(%s)" % self._print(expr.args[0])

    def _print_Exp1(self, expr):
        return "exp(1)"


_PRINTER = JetPrinter()


def print_expr(e: Expr) -> str:
    return _PRINTER.doprint(e)
