"""Feature/cost samples bound to a nominal problem, with a train/test split."""

from dataclasses import dataclass
from enum import Enum
from typing import Iterator, Optional, Tuple

import numpy as np

from dflregret.errors import InvalidDimension
from dflregret.problems import NominalProblem


class Split(str, Enum):
    TRAIN = "train"
    TEST = "test"
    ALL = "all"


@dataclass(frozen=True, eq=False)
class Sample:
    features: np.ndarray
    cost: np.ndarray


@dataclass(frozen=True, eq=False)
class GenParams:
    n_samples: int
    n_features: int
    deg: Optional[int] = None
    noise: Optional[float] = None
    seed: Optional[int] = None
    true_omega: Optional[np.ndarray] = None
    omega_law: str = "bernoulli"

    def __eq__(self, other):
        if not isinstance(other, GenParams):
            return NotImplemented
        same_omega = (
            (self.true_omega is None and other.true_omega is None)
            or (
                self.true_omega is not None
                and other.true_omega is not None
                and np.array_equal(self.true_omega, other.true_omega)
            )
        )
        return same_omega and (
            self.n_samples, self.n_features, self.deg, self.noise, self.seed, self.omega_law
        ) == (
            other.n_samples, other.n_features, other.deg, other.noise, other.seed, other.omega_law
        )


def train_size(n_samples: int) -> int:
    """round(0.7 * N) with halves rounded up."""
    return (7 * n_samples + 5) // 10


@dataclass(frozen=True, eq=False)
class Dataset:
    """N samples stored as a feature matrix (N x K) and a cost matrix (N x n)."""
    problem: NominalProblem
    x: np.ndarray
    c: np.ndarray
    train: Tuple[int, ...]
    test: Tuple[int, ...]
    gen_params: GenParams

    def __post_init__(self):
        x = np.array(self.x, dtype=float)
        c = np.array(self.c, dtype=float)
        if x.ndim != 2 or c.ndim != 2 or x.shape[0] != c.shape[0]:
            raise InvalidDimension(f"features {x.shape} and costs {c.shape} must be N x K and N x n")
        if c.shape[1] != self.problem.n:
            raise InvalidDimension(f"costs have {c.shape[1]} entries, problem has n={self.problem.n}")
        train = tuple(int(i) for i in self.train)
        test = tuple(int(i) for i in self.test)
        if sorted(train + test) != list(range(x.shape[0])):
            raise InvalidDimension("train and test indices must partition the samples")
        x.setflags(write=False)
        c.setflags(write=False)
        object.__setattr__(self, "x", x)
        object.__setattr__(self, "c", c)
        object.__setattr__(self, "train", train)
        object.__setattr__(self, "test", test)

    def __eq__(self, other):
        if not isinstance(other, Dataset):
            return NotImplemented
        return (
            self.problem == other.problem
            and np.array_equal(self.x, other.x)
            and np.array_equal(self.c, other.c)
            and self.train == other.train
            and self.test == other.test
            and self.gen_params == other.gen_params
        )

    __hash__ = None

    @property
    def n_samples(self) -> int:
        return self.x.shape[0]

    @property
    def n_features(self) -> int:
        return self.x.shape[1]

    def indices(self, split: Split = Split.ALL) -> np.ndarray:
        split = Split(split)
        if split is Split.TRAIN:
            return np.array(self.train, dtype=int)
        if split is Split.TEST:
            return np.array(self.test, dtype=int)
        return np.arange(self.n_samples)

    def features(self, split: Split = Split.ALL) -> np.ndarray:
        return self.x[self.indices(split)]

    def costs(self, split: Split = Split.ALL) -> np.ndarray:
        return self.c[self.indices(split)]

    def samples(self, split: Split = Split.ALL) -> Iterator[Sample]:
        for i in self.indices(split):
            yield Sample(features=self.x[i], cost=self.c[i])

    def subset(self, split: Split) -> "Dataset":
        """The samples of one split as a dataset whose train split is all of them."""
        idx = self.indices(split)
        return Dataset(
            problem=self.problem,
            x=self.x[idx],
            c=self.c[idx],
            train=tuple(range(len(idx))),
            test=(),
            gen_params=self.gen_params,
        )
