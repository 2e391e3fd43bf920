"""Euler operators, adjoints, divergence detection and homotopy fluxes."""

from jetlaw.variational.homotopy import homotopy_fluxes, invert_total_derivative
from jetlaw.variational.operators import (
    FluxVector,
    LinDiffOp,
    adjoint,
    euler,
    euler_lagrange_system,
    is_divergence,
)

__all__ = [
    "FluxVector",
    "LinDiffOp",
    "adjoint",
    "euler",
    "euler_lagrange_system",
    "homotopy_fluxes",
    "invert_total_derivative",
    "is_divergence",
]
