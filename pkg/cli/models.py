from enum import Enum
from typing import List, Optional, Tuple

from pydantic import BaseModel, Field, field_validator


class ProblemChoice(str, Enum):
    SHORTEST_PATH = "sp"
    MATCHING = "bm"
    TRIANGLE_DEMO = "triangle-demo"
    SQUARE_DEMO = "square-demo"
    CONFLICTING_DEMO = "conflicting-demo"


class MethodChoice(str, Enum):
    LSQ = "lsq"
    SPO = "spo"
    LS = "ls"
    ALT = "alt"
    SPO_LS = "spo-ls"
    SPO_ALT = "spo-alt"
    SPO_LS_ALT = "spo-ls-alt"


class SplitChoice(str, Enum):
    TRAIN = "train"
    TEST = "test"
    ALL = "all"


class ModeChoice(str, Enum):
    PESSIMISTIC = "pessimistic"
    OPTIMISTIC = "optimistic"


class VariantChoice(str, Enum):
    EXACT = "exact"
    PENALIZED = "penalized"


BENCH_METHODS = ("SPO", "SPO-LS", "SPO-ALT", "SPO-LS-ALT")
BENCH_COLUMNS = [
    "problem",
    "N",
    "deg",
    "noise",
    "method",
    "split",
    "mean_regret",
    "normalized_regret",
    "wall_s",
    "iters",
]


class BenchRow(BaseModel):
    """One CSV line: a (instance, method, split) result."""
    problem: str
    N: int = Field(ge=1)
    deg: int = Field(ge=1)
    noise: float = Field(ge=0.0, lt=1.0)
    method: str
    split: str
    mean_regret: float
    normalized_regret: Optional[float] = Field(default=None, ge=0.0)
    wall_s: float = Field(ge=0.0)
    iters: int = Field(ge=0)

    @field_validator("method")
    @classmethod
    def _known_method(cls, value: str) -> str:
        if value not in BENCH_METHODS:
            raise ValueError(f"method must be one of {BENCH_METHODS}")
        return value


class ProblemSpec(BaseModel):
    """A problem family of a benchmark suite."""
    kind: str  # "sp" | "bm"
    grid: Tuple[int, int] = (5, 5)
    left: int = 13
    right: int = 12
    edges: int = 40

    @property
    def label(self) -> str:
        if self.kind == "sp":
            return f"sp-{self.grid[0]}x{self.grid[1]}"
        return f"bm-{self.left}x{self.right}-{self.edges}"


class Suite(BaseModel):
    name: str
    problems: List[ProblemSpec]
    n_samples: List[int]
    degs: List[int]
    noises: List[float]
    n_features: int = 5


class BenchInstance(BaseModel):
    index: int
    problem: ProblemSpec
    n_samples: int
    deg: int
    noise: float
    n_features: int
    seed: int


SUITES = {
    "tiny": Suite(
        name="tiny",
        problems=[ProblemSpec(kind="sp", grid=(3, 3))],
        n_samples=[20],
        degs=[2],
        noises=[0.5],
        n_features=3,
    ),
    "paper-n50": Suite(
        name="paper-n50",
        problems=[ProblemSpec(kind="sp"), ProblemSpec(kind="bm")],
        n_samples=[50],
        degs=[2, 8, 16],
        noises=[0.0, 0.5],
    ),
    "paper-small": Suite(
        name="paper-small",
        problems=[ProblemSpec(kind="sp"), ProblemSpec(kind="bm")],
        n_samples=[50, 100, 200],
        degs=[2, 8, 16],
        noises=[0.0, 0.5],
    ),
}

SUITE_ALIASES = {
    "bench-n50": "paper-n50",
    "bench-small": "paper-small",
}
