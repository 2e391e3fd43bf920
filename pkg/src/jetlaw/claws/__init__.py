"""Conservation laws, multipliers and the λ-bridge for constrained families."""

from jetlaw.claws.bridge import (
    BridgeResult,
    FirstIntegral,
    Syzygy,
    bridge_verify,
    construct_c_lambda,
    first_integral,
    solve_lambda,
    syzygy_from_expression,
    verify_syzygy,
)
from jetlaw.claws.conservation import (
    characteristic_form,
    check_candidate,
    determining_equations,
    equivalent,
    is_trivial,
    verify_cl,
    verify_multiplier,
)
from jetlaw.claws.model import (
    CharacteristicForm,
    ConservationLaw,
    ConstraintSet,
    LambdaSolution,
    Multiplier,
)

__all__ = [
    "BridgeResult",
    "CharacteristicForm",
    "ConservationLaw",
    "ConstraintSet",
    "FirstIntegral",
    "LambdaSolution",
    "Multiplier",
    "Syzygy",
    "bridge_verify",
    "characteristic_form",
    "check_candidate",
    "construct_c_lambda",
    "determining_equations",
    "equivalent",
    "first_integral",
    "is_trivial",
    "solve_lambda",
    "syzygy_from_expression",
    "verify_cl",
    "verify_multiplier",
    "verify_syzygy",
]
