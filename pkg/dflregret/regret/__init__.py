from .models import LinearModel, ModelFile, augment_features, prediction_operator
from .duality import DualStructure, dual_structure
from .oracle import (
    RegretMode,
    RegretOracle,
    RegretReport,
    normalize,
    optimal_face_lp,
    optimistic_regret,
    pessimistic_regret,
    sample_regret,
    scale_prediction,
    true_optimum,
)

__all__ = [
    "DualStructure",
    "dual_structure",
    "LinearModel",
    "ModelFile",
    "augment_features",
    "prediction_operator",
    "RegretMode",
    "RegretOracle",
    "RegretReport",
    "normalize",
    "optimal_face_lp",
    "optimistic_regret",
    "pessimistic_regret",
    "sample_regret",
    "scale_prediction",
    "true_optimum",
]
