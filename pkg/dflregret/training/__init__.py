from .alternating import (
    FixedDuals,
    Lp1Result,
    alternating,
    solve_lp1_fixed_omega,
    solve_lp2_fixed_duals,
)
from .baselines import train_least_squares
from .local_search import local_search
from .pipeline import METHODS, Stage, parse_method, pipeline, stage_budgets
from .settings import StageReport, TerminationReason, TrainConfig, TrainTrace
from .spo_plus import solve_spo_plus_lp, spo_plus_loss, spo_plus_losses, train_spo_plus

__all__ = [
    "FixedDuals",
    "Lp1Result",
    "alternating",
    "solve_lp1_fixed_omega",
    "solve_lp2_fixed_duals",
    "train_least_squares",
    "local_search",
    "METHODS",
    "Stage",
    "parse_method",
    "pipeline",
    "stage_budgets",
    "StageReport",
    "TerminationReason",
    "TrainConfig",
    "TrainTrace",
    "solve_spo_plus_lp",
    "spo_plus_loss",
    "spo_plus_losses",
    "train_spo_plus",
]
