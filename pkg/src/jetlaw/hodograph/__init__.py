"""Hodograph transformations exchanging one dependent and one independent variable."""

from jetlaw.hodograph.transform import (
    ORDER_CAP,
    HodographMap,
    TransformedLaw,
    build_map,
    inverse_map,
    jacobian,
    transform_cl,
    transform_expr,
    transform_system,
)

__all__ = [
    "ORDER_CAP",
    "HodographMap",
    "TransformedLaw",
    "build_map",
    "inverse_map",
    "jacobian",
    "transform_cl",
    "transform_expr",
    "transform_system",
]
