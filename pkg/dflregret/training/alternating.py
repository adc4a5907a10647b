"""Alternating descent between the fixed-omega LP and the fixed-dual LP.

With omega fixed, the single-level reformulation splits into one LP per
sample over (mu, delta, gamma) whose total value is Lambda + mean z*.
With (delta, gamma) fixed it becomes one LP over (omega, mu). Alternating
the two never increases Lambda.
"""

import time
from dataclasses import dataclass
from typing import Optional, Tuple

import numpy as np
import structlog

from dflregret.data import Dataset, Split
from dflregret.errors import InfeasibleProblem, TimeBudgetExceeded
from dflregret.lp import LPBuilder, LPStatus, Sense, require_optimal, solve
from dflregret.problems import NominalProblem
from dflregret.regret import (
    LinearModel,
    RegretOracle,
    augment_features,
    dual_structure,
    prediction_operator,
)
from dflregret.training.settings import TerminationReason, TrainConfig, TrainTrace

logger = structlog.get_logger()

INCREASE_TOL = 1e-7


@dataclass(frozen=True, eq=False)
class FixedDuals:
    """Per-sample multipliers, expressed for the unscaled predictions omega x_i."""
    mu: np.ndarray  # N x compact rows
    delta: np.ndarray  # N x n
    gamma: np.ndarray  # N


@dataclass(frozen=True, eq=False)
class Lp1Result:
    duals: FixedDuals
    value: float
    offset: float  # mean z*

    @property
    def regret(self) -> float:
        return self.value - self.offset


def solve_lp1_fixed_omega(
    problem: NominalProblem,
    dataset: Dataset,
    model: LinearModel,
    split: Split = Split.TRAIN,
    oracle: Optional[RegretOracle] = None,
    deadline: Optional[float] = None,
) -> Lp1Result:
    """Duals (mu, delta, gamma) of the inner maximization for a fixed model.

    Raises TimeBudgetExceeded when ``deadline`` passes during a per-sample LP.
    """
    oracle = oracle or RegretOracle(problem, dataset, split)
    model.check_dimensions(problem.n, oracle.features.shape[1])
    structure = dual_structure(problem)
    chat = model.predict(oracle.features)
    n_samples = oracle.n_samples

    mu = np.zeros((n_samples, structure.n_mu))
    delta = np.zeros((n_samples, structure.n_delta))
    gamma = np.zeros(n_samples)
    value = 0.0
    for i in range(n_samples):
        peak = float(np.max(np.abs(chat[i]), initial=0.0))
        scale = peak if peak > 0.0 else 1.0
        scaled = chat[i] / scale

        builder = LPBuilder()
        builder.add_variables("mu", structure.n_mu, lower=structure.mu_lower, upper=structure.mu_upper)
        builder.add_variables("delta", structure.n_delta, lower=structure.delta_lower)
        builder.add_variables("gamma", 1, lower=0.0)
        builder.add_rows(
            {"mu": structure.matrix.T, "gamma": scaled[:, None]},
            Sense.EQ,
            oracle.costs[i] / n_samples,
        )
        if len(structure.linked_rows):
            builder.add_rows(
                {
                    "delta": structure.matrix[structure.linked_rows],
                    "gamma": -structure.rhs[structure.linked_rows][:, None],
                },
                structure.linked_senses,
                0.0,
            )
        builder.set_objective({"mu": structure.rhs, "delta": scaled})

        solution = require_optimal(solve(builder.build(), deadline=deadline), what=f"LP1 sample {i}")
        mu[i] = builder.extract(solution.primal, "mu")
        delta[i] = builder.extract(solution.primal, "delta") / scale
        gamma[i] = builder.extract(solution.primal, "gamma")[0] / scale
        value += solution.objective

    offset = float(np.mean(oracle.zstar)) if n_samples else 0.0
    logger.debug("lp1_solved", n_samples=n_samples, value=value, regret=value - offset)
    return Lp1Result(duals=FixedDuals(mu=mu, delta=delta, gamma=gamma), value=value, offset=offset)


def solve_lp2_fixed_duals(
    problem: NominalProblem,
    dataset: Dataset,
    duals: FixedDuals,
    omega_bound: float,
    bias: bool = True,
    split: Split = Split.TRAIN,
    oracle: Optional[RegretOracle] = None,
    deadline: Optional[float] = None,
) -> Tuple[LinearModel, float]:
    """min sum_i b'mu_i + (omega x_i)'delta_i  s.t.  A'mu_i + (omega x_i) gamma_i = c_i / N, |omega| <= B.

    Raises InfeasibleProblem when no omega in the box matches the fixed duals
    and TimeBudgetExceeded when ``deadline`` passes first.
    """
    oracle = oracle or RegretOracle(problem, dataset, split)
    structure = dual_structure(problem)
    x = augment_features(oracle.features, bias)
    n_samples, k = x.shape
    n = problem.n

    builder = LPBuilder()
    builder.add_variables("omega", n * k, lower=-omega_bound, upper=omega_bound)
    for i in range(n_samples):
        builder.add_variables(f"mu_{i}", structure.n_mu, lower=structure.mu_lower, upper=structure.mu_upper)
    for i in range(n_samples):
        builder.add_rows(
            {"omega": duals.gamma[i] * prediction_operator(x[i], n), f"mu_{i}": structure.matrix.T},
            Sense.EQ,
            oracle.costs[i] / n_samples,
        )
    objective = {"omega": (duals.delta.T @ x).reshape(-1)}
    for i in range(n_samples):
        objective[f"mu_{i}"] = structure.rhs
    builder.set_objective(objective)

    solution = solve(builder.build(), deadline=deadline)
    if solution.status is LPStatus.INFEASIBLE:
        raise InfeasibleProblem("LP2 has no feasible omega for the fixed duals")
    require_optimal(solution, what="LP2")
    omega = builder.extract(solution.primal, "omega").reshape(n, k)
    logger.debug("lp2_solved", value=solution.objective, iterations=solution.iterations)
    return LinearModel(omega=omega, bias=bias), solution.objective


def alternating(
    problem: NominalProblem,
    dataset: Dataset,
    model0: LinearModel,
    cfg: TrainConfig,
    oracle: Optional[RegretOracle] = None,
    budget_s: Optional[float] = None,
) -> Tuple[LinearModel, TrainTrace]:
    """Alternate LP1 and LP2 from ``model0``; return the best iterate by Lambda.

    Stops on the iteration cap, the time budget, ``alt_patience`` consecutive
    improvements below ``alt_tol``, an infeasible LP2, or a recomputed Lambda
    that rose by more than 1e-7 (the incumbent is kept). An iteration is not
    started when the previous one would no longer fit in the budget, and the
    LPs of a started one stop at the budget deadline.
    """
    oracle = oracle or RegretOracle(problem, dataset, Split.TRAIN)
    budget_s = cfg.alt_budget_s if budget_s is None else budget_s

    start = time.perf_counter()
    current = model0
    current_value = oracle.value(model0)
    best, best_value = current, current_value
    trace = TrainTrace()
    trace.record(current_value, time.perf_counter() - start)
    trace.termination = TerminationReason.ITERATION_LIMIT
    stalled = 0
    deadline = None if budget_s is None else start + budget_s
    last_iteration_s = 0.0

    for iteration in range(cfg.alt_iters):
        if budget_s is not None and time.perf_counter() - start + last_iteration_s > budget_s:
            trace.termination = TerminationReason.TIME_BUDGET
            logger.warning("alt_time_budget", iteration=iteration, budget_s=budget_s, best=best_value)
            break

        tic = time.perf_counter()
        try:
            lp1 = solve_lp1_fixed_omega(problem, dataset, current, oracle=oracle, deadline=deadline)
            box = max(cfg.omega_bound, float(np.max(np.abs(current.omega), initial=0.0)))
            try:
                candidate, lp2_value = solve_lp2_fixed_duals(
                    problem, dataset, lp1.duals, box, bias=current.bias, oracle=oracle, deadline=deadline
                )
            except InfeasibleProblem:
                trace.termination = TerminationReason.LP2_INFEASIBLE
                logger.warning("lp2_infeasible", iteration=iteration)
                break
        except TimeBudgetExceeded as e:
            trace.termination = TerminationReason.TIME_BUDGET
            logger.warning(
                "alt_time_budget", iteration=iteration, budget_s=budget_s, best=best_value, during=str(e)
            )
            break

        candidate_value = oracle.value(candidate)
        if candidate_value > current_value + INCREASE_TOL:
            trace.termination = TerminationReason.NUMERICAL_INCREASE
            logger.warning(
                "alt_numerical_increase",
                iteration=iteration,
                current=current_value,
                candidate=candidate_value,
                lp1=lp1.value,
                lp2=lp2_value,
            )
            break

        improvement = current_value - candidate_value
        current, current_value = candidate, candidate_value
        last_iteration_s = time.perf_counter() - tic
        trace.record(current_value, last_iteration_s)
        trace.iterations = iteration + 1
        if current_value <= best_value:
            best, best_value = current, current_value
        logger.debug("alt_iteration", iteration=iteration, value=current_value, lp1=lp1.value, lp2=lp2_value)

        if improvement < cfg.alt_tol:
            stalled += 1
            if stalled >= cfg.alt_patience:
                trace.termination = TerminationReason.NO_IMPROVEMENT
                break
        else:
            stalled = 0

    logger.info(
        "alt_finished",
        iterations=trace.iterations,
        start=trace.values[0],
        final=best_value,
        termination=trace.termination.value,
    )
    return best, trace
