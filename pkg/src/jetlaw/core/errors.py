"""
Domain errors shared across jetlaw modules.

Every error raised by the engine derives from JetlawError so callers (the CLI,
the corpus runner) can report them uniformly.
"""

from typing import Optional


class JetlawError(Exception):
    """Base class for all engine errors"""

    pass


class MissingAssignment(JetlawError):
    """Raised when numeric evaluation meets a symbol without a value"""

    pass


class DomainError(JetlawError):
    """Raised when numeric evaluation leaves the domain of an elementary function"""

    pass


class InvalidSystem(JetlawError):
    """Raised when a PDE system is malformed or its reduction does not terminate"""

    pass


class HomotopySingular(JetlawError):
    """Raised when the homotopy integral cannot be evaluated at the basepoint"""

    pass


class NotExactDerivative(JetlawError):
    """Raised when an expression is not a total derivative in the requested direction"""

    pass


class UnsupportedConstraintShape(JetlawError):
    """Raised when a constraint matrix is outside the shapes solve_lambda handles"""

    pass


class ShapeMismatch(JetlawError):
    """Raised when a conservation law does not have the shape an operation expects"""

    pass


class OrderTooHigh(JetlawError):
    """Raised when a hodograph table is asked for derivatives above its cap"""

    pass


class FluxReconstructionFailed(JetlawError):
    """Raised when fluxes cannot be recovered for a divergence (homotopy or change of variables)"""

    pass


class ProblemError(JetlawError):
    """Base class for problem-file errors"""

    pass


class ParseError(ProblemError):
    """Raised on malformed input, carrying the 1-based line and column"""

    def __init__(self, message: str, line: int = 0, column: int = 0):
        self.line = line
        self.column = column
        location = f"line {line}, column {column}: " if line else ""
        super().__init__(f"{location}{message}")


class MissingVars(ProblemError):
    """Raised when a problem file has no usable [vars] section"""

    pass


class UndeclaredSymbol(ParseError):
    """Raised when an expression uses a name the problem never declared"""

    def __init__(self, name: str, line: int = 0, column: int = 0):
        self.name = name
        super().__init__(f"undeclared symbol '{name}'", line, column)


class UnknownSection(ParseError):
    """Raised for section headers the format does not define"""

    pass


class SyzygyRedundancy(UserWarning):
    """Declared syzygies make characteristic forms non-unique"""

    pass


def describe(error: Exception, context: Optional[str] = None) -> str:
    """One-line diagnostic for CLI output."""
    prefix = f"{context}: " if context else ""
    return f"{prefix}{type(error).__name__}: {error}"
