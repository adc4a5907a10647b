"""Random local search around an incumbent model."""

import time
from concurrent.futures import ThreadPoolExecutor
from typing import List, Optional, Tuple

import numpy as np
import structlog

from dflregret.data import Dataset, Split
from dflregret.problems import NominalProblem
from dflregret.regret import LinearModel, RegretOracle
from dflregret.training.settings import TerminationReason, TrainConfig, TrainTrace

logger = structlog.get_logger()


def _evaluate(oracle: RegretOracle, candidates: List[LinearModel], workers: int) -> List[float]:
    if workers == 1 or len(candidates) == 1:
        return [oracle.value(m) for m in candidates]
    with ThreadPoolExecutor(max_workers=workers) as executor:
        return list(executor.map(oracle.value, candidates))


def local_search(
    problem: NominalProblem,
    dataset: Dataset,
    model0: LinearModel,
    cfg: TrainConfig,
    oracle: Optional[RegretOracle] = None,
    budget_s: Optional[float] = None,
) -> Tuple[LinearModel, TrainTrace]:
    """Sample ``ls_samples`` perturbations omega + eps * N(0, 1) per iteration.

    The best candidate replaces the incumbent when its Lambda is no worse, so
    Lambda never increases. An iteration is only started when one more of the
    length of the last fits in the remaining budget.
    """
    oracle = oracle or RegretOracle(problem, dataset, Split.TRAIN)
    budget_s = cfg.ls_budget_s if budget_s is None else budget_s
    rng = np.random.default_rng(cfg.seed)

    start = time.perf_counter()
    incumbent = model0
    best = oracle.value(model0)
    trace = TrainTrace()
    trace.record(best, time.perf_counter() - start)
    trace.termination = TerminationReason.ITERATION_LIMIT
    last_iteration_s = 0.0

    for iteration in range(cfg.ls_iters):
        if budget_s is not None and time.perf_counter() - start + last_iteration_s > budget_s:
            trace.termination = TerminationReason.TIME_BUDGET
            logger.warning("ls_time_budget", iteration=iteration, budget_s=budget_s, best=best)
            break

        tic = time.perf_counter()
        steps = rng.standard_normal((cfg.ls_samples,) + incumbent.omega.shape)
        candidates = [
            LinearModel(omega=incumbent.omega + cfg.ls_epsilon * step, bias=incumbent.bias)
            for step in steps
        ]
        values = _evaluate(oracle, candidates, cfg.workers)
        j = int(np.argmin(values))
        if values[j] <= best:
            incumbent, best = candidates[j], float(values[j])

        last_iteration_s = time.perf_counter() - tic
        trace.record(best, last_iteration_s)
        trace.iterations = iteration + 1
        logger.debug("ls_iteration", iteration=iteration, best=best, candidate_min=float(values[j]))

    logger.info(
        "ls_finished",
        iterations=trace.iterations,
        start=trace.values[0],
        final=best,
        termination=trace.termination.value,
    )
    return incumbent, trace
