"""
jetlaw - symbolic differential algebra for conservation-law reductions

A jet-space engine for PDE systems with:
- Total derivatives, Euler operators and homotopy integration
- Orthonomic systems and normal forms on solutions
- Conservation laws, multipliers and the lambda bridge for constrained families
- Generalized symmetries and Noether checks
- Hodograph transformations of conservation laws
"""

__version__ = "0.1.0"

# Re-export main entry points for easy importing
from jetlaw.core import ConfigProvider, EngineSettings
from jetlaw.expr import JetSpace, Verdict, is_zero
from jetlaw.jet import PdeSystem, Ranking
from jetlaw.problem import load_problem, parse_problem, print_problem

__all__ = [
    "__version__",
    "ConfigProvider",
    "EngineSettings",
    "JetSpace",
    "PdeSystem",
    "Ranking",
    "Verdict",
    "is_zero",
    "load_problem",
    "parse_problem",
    "print_problem",
]
