import numpy as np
import structlog

from dflregret.data import Dataset, Split
from dflregret.problems import NominalProblem
from dflregret.regret import LinearModel, augment_features

logger = structlog.get_logger()


def train_least_squares(
    problem: NominalProblem,
    dataset: Dataset,
    bias: bool = True,
    split: Split = Split.TRAIN,
) -> LinearModel:
    """Per-arc ordinary least squares of costs on features."""
    x = augment_features(dataset.features(split), bias)
    c = dataset.costs(split)
    coefficients, _, rank, _ = np.linalg.lstsq(x, c, rcond=None)
    logger.info("least_squares_fitted", n_samples=x.shape[0], n=problem.n, rank=int(rank))
    return LinearModel(omega=coefficients.T, bias=bias)
