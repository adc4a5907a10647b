"""SPO+ surrogate loss and its LP training formulation."""

from typing import Optional, Tuple

import numpy as np
import structlog

from dflregret.data import Dataset, Split
from dflregret.lp import LPBuilder, Sense, require_optimal, solve
from dflregret.problems import NominalProblem
from dflregret.regret import (
    LinearModel,
    RegretOracle,
    augment_features,
    prediction_operator,
    true_optimum,
)

logger = structlog.get_logger()


def spo_plus_loss(
    problem: NominalProblem,
    c: np.ndarray,
    chat: np.ndarray,
    zstar: Optional[float] = None,
    vstar: Optional[np.ndarray] = None,
) -> float:
    """max_v (c - 2 chat)'v + 2 chat'v*(c) - z*(c), the max taken over V."""
    c = np.asarray(c, dtype=float)
    chat = np.asarray(chat, dtype=float)
    if zstar is None or vstar is None:
        zstar, vstar = true_optimum(problem, c)
    inner = require_optimal(
        solve(problem.polytope.with_objective(-(c - 2.0 * chat))),
        what="SPO+ inner LP",
    )
    return -inner.objective + 2.0 * float(chat @ vstar) - zstar


def spo_plus_losses(
    problem: NominalProblem,
    dataset: Dataset,
    model: LinearModel,
    split: Split = Split.TRAIN,
    oracle: Optional[RegretOracle] = None,
) -> np.ndarray:
    """Per-sample SPO+ loss of ``model`` on one split."""
    oracle = oracle or RegretOracle(problem, dataset, split)
    chat = model.predict(oracle.features)
    return np.array([
        spo_plus_loss(problem, oracle.costs[i], chat[i], oracle.zstar[i], oracle.vstar[i])
        for i in range(oracle.n_samples)
    ])


def solve_spo_plus_lp(
    problem: NominalProblem,
    dataset: Dataset,
    bias: bool = True,
    split: Split = Split.TRAIN,
    oracle: Optional[RegretOracle] = None,
    deadline: Optional[float] = None,
) -> Tuple[LinearModel, float]:
    """Minimize the mean SPO+ loss over linear models.

    The inner maximum of each loss is replaced by its LP dual, giving one LP
    over (omega, rho_1..rho_N):

        min  (1/N) sum_i ( -b'rho_i + 2 (omega x_i)'v*_i )
        s.t. A'rho_i - 2 omega x_i = -c_i,   rho_i >= 0 (free on EQ rows)

    Returns the model and its mean SPO+ loss (LP value minus mean z*). Raises
    TimeBudgetExceeded when ``deadline`` (a perf_counter instant) passes first.
    """
    oracle = oracle or RegretOracle(problem, dataset, split)
    form = problem.compact_form
    x = augment_features(oracle.features, bias)
    n_samples, k = x.shape
    n = problem.n

    builder = LPBuilder()
    builder.add_variables("omega", n * k)
    rho_lower = np.where(form.is_equality, -np.inf, 0.0)
    for i in range(n_samples):
        builder.add_variables(f"rho_{i}", form.n_rows, lower=rho_lower)
    for i in range(n_samples):
        builder.add_rows(
            {"omega": -2.0 * prediction_operator(x[i], n), f"rho_{i}": form.matrix.T},
            Sense.EQ,
            -oracle.costs[i],
        )

    objective = {"omega": (2.0 / n_samples) * (oracle.vstar.T @ x).reshape(-1)}
    for i in range(n_samples):
        objective[f"rho_{i}"] = -form.rhs / n_samples
    builder.set_objective(objective)

    solution = require_optimal(solve(builder.build(), deadline=deadline), what="SPO+ LP")
    omega = builder.extract(solution.primal, "omega").reshape(n, k)
    mean_loss = solution.objective - float(np.mean(oracle.zstar))
    logger.info(
        "spo_plus_solved",
        n_samples=n_samples,
        variables=builder.n_vars,
        rows=builder.n_rows,
        iterations=solution.iterations,
        mean_loss=mean_loss,
    )
    return LinearModel(omega=omega, bias=bias), mean_loss


def train_spo_plus(problem: NominalProblem, dataset: Dataset, bias: bool = True) -> LinearModel:
    """SPO+ model fitted on the train split."""
    model, _ = solve_spo_plus_lp(problem, dataset, bias=bias)
    return model
