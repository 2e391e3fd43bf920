"""Symmetry characteristics and the Noether correspondence."""

from jetlaw.symmetry.characteristics import (
    Characteristic,
    NoetherReport,
    apply_prolonged,
    bracket,
    characteristic_from_point,
    check_noether1,
    check_symmetry,
    check_variational,
)

__all__ = [
    "Characteristic",
    "NoetherReport",
    "apply_prolonged",
    "bracket",
    "characteristic_from_point",
    "check_noether1",
    "check_symmetry",
    "check_variational",
]
