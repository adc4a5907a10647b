from .builder import LPBuilder, VariableBlock
from .checks import assert_bounded_nonempty
from .problem import (
    CanonicalForm,
    CanonicalLayout,
    LPProblem,
    LPSolution,
    LPStatus,
    Sense,
    canonical_layout,
    canonicalize,
)
from .simplex import SimplexSettings, require_optimal, solve

__all__ = [
    "LPBuilder",
    "VariableBlock",
    "assert_bounded_nonempty",
    "CanonicalForm",
    "CanonicalLayout",
    "LPProblem",
    "LPSolution",
    "LPStatus",
    "Sense",
    "canonical_layout",
    "canonicalize",
    "SimplexSettings",
    "require_optimal",
    "solve",
]
