"""Run configuration and run records shared by every trainer."""

from dataclasses import dataclass, field
from enum import Enum
from typing import Any, Dict, List, Optional

from pydantic import BaseModel, Field, ValidationError

from dflregret.config import get_config
from dflregret.errors import InvalidParam
from dflregret.problems import ProblemKind
from dflregret.regret import LinearModel

# Neighbourhood sizes that worked best per problem family
DEFAULT_EPSILON = {
    ProblemKind.SHORTEST_PATH: 0.1,
    ProblemKind.MATCHING: 1.0,
    ProblemKind.CUSTOM: 1.0,
}


class TrainConfig(BaseModel):
    """Hyperparameters of the local-search and alternating trainers."""
    ls_epsilon: float = Field(default=0.1, ge=0.0, description="Perturbation scale of local search")
    ls_samples: int = Field(default=20, ge=1, description="Candidates per local-search iteration")
    ls_iters: int = Field(default=20, ge=0, description="Local-search iterations")
    alt_iters: int = Field(default=50, ge=0, description="Cap on alternating-descent iterations")
    alt_tol: float = Field(default=1e-9, ge=0.0, description="Minimum Lambda improvement per iteration")
    alt_patience: int = Field(default=3, ge=1, description="Iterations below alt_tol before stopping")
    omega_bound: float = Field(default=1000.0, gt=0.0, description="Box |omega| <= B for the LP2 step")
    spo_budget_s: Optional[float] = Field(default=None, gt=0.0, description="Wall-clock cap on the SPO+ LP")
    ls_budget_s: Optional[float] = Field(default=None, gt=0.0, description="Wall-clock budget of the LS stage")
    alt_budget_s: Optional[float] = Field(default=None, gt=0.0, description="Wall-clock budget of the ALT stage")
    bias: bool = Field(default=True, description="Append an intercept column to the features")
    workers: int = Field(default=1, ge=1, description="Threads for concurrent candidate evaluation")
    seed: int = Field(default=0, description="Seed of the local-search perturbations")

    @classmethod
    def create(cls, **values: Any) -> "TrainConfig":
        """Validate ``values``, raising InvalidParam instead of ValidationError."""
        try:
            return cls(**values)
        except ValidationError as e:
            raise InvalidParam(f"Invalid training configuration: {e}") from e

    @classmethod
    def from_config(cls, **overrides: Any) -> "TrainConfig":
        """Defaults from the ``training`` block of the active configuration."""
        base = {k: v for k, v in get_config().get("training", {}).items() if k in cls.model_fields}
        base.update({k: v for k, v in overrides.items() if v is not None})
        return cls.create(**base)

    @classmethod
    def for_problem(cls, kind: ProblemKind, **overrides: Any) -> "TrainConfig":
        """Configuration with the per-problem default neighbourhood size."""
        if overrides.get("ls_epsilon") is None:
            overrides["ls_epsilon"] = DEFAULT_EPSILON[ProblemKind(kind)]
        return cls.from_config(**overrides)


class TerminationReason(str, Enum):
    SOLVED = "solved"
    ITERATION_LIMIT = "iteration_limit"
    TIME_BUDGET = "time_budget"
    NO_IMPROVEMENT = "no_improvement"
    LP2_INFEASIBLE = "lp2_infeasible"
    NUMERICAL_INCREASE = "numerical_increase"


@dataclass
class TrainTrace:
    """Lambda after each iteration; ``values[0]`` is the starting point."""
    values: List[float] = field(default_factory=list)
    wall_s: List[float] = field(default_factory=list)
    iterations: int = 0
    termination: TerminationReason = TerminationReason.ITERATION_LIMIT

    def record(self, value: float, wall_s: float) -> None:
        self.values.append(float(value))
        self.wall_s.append(float(wall_s))

    @property
    def final(self) -> float:
        return self.values[-1]

    def to_dict(self) -> Dict[str, Any]:
        return {
            "values": self.values,
            "wall_s": self.wall_s,
            "iterations": self.iterations,
            "termination": self.termination.value,
        }


@dataclass
class StageReport:
    stage: str
    train_regret: float
    wall_s: float
    iterations: int
    termination: TerminationReason
    trace: Optional[TrainTrace] = None
    model: Optional[LinearModel] = field(default=None, repr=False)

    def to_dict(self) -> Dict[str, Any]:
        return {
            "stage": self.stage,
            "train_regret": self.train_regret,
            "wall_s": self.wall_s,
            "iterations": self.iterations,
            "termination": self.termination.value,
            "trace": None if self.trace is None else self.trace.to_dict(),
        }
