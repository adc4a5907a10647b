"""Staged training: SPO+ start, then optional local search and alternating descent."""

import time
from enum import Enum
from typing import Dict, List, Optional, Sequence, Tuple, Union

import structlog

from dflregret.data import Dataset, Split
from dflregret.errors import InvalidParam
from dflregret.problems import NominalProblem
from dflregret.regret import LinearModel, RegretOracle
from dflregret.training.alternating import alternating
from dflregret.training.local_search import local_search
from dflregret.training.settings import StageReport, TerminationReason, TrainConfig
from dflregret.training.spo_plus import solve_spo_plus_lp

logger = structlog.get_logger()


class Stage(str, Enum):
    SPO = "SPO"
    LS = "LS"
    ALT = "ALT"


METHODS: Dict[str, List[Stage]] = {
    "SPO": [Stage.SPO],
    "SPO-LS": [Stage.SPO, Stage.LS],
    "SPO-ALT": [Stage.SPO, Stage.ALT],
    "SPO-LS-ALT": [Stage.SPO, Stage.LS, Stage.ALT],
}


def parse_method(method: str) -> List[Stage]:
    """'SPO-LS-ALT' -> [SPO, LS, ALT]."""
    key = method.strip().upper()
    if key not in METHODS:
        raise InvalidParam(f"Unknown method {method!r}; expected one of {sorted(METHODS)}")
    return list(METHODS[key])


def stage_budgets(sequence: Sequence[Stage], cfg: TrainConfig) -> Dict[Stage, Optional[float]]:
    """Per-stage wall-clock budgets; ALT inherits the LS budget when LS is skipped.

    The SPO budget is a hard cap: the later stages need its model, so running
    out there raises TimeBudgetExceeded instead of ending the stage early.
    """
    ls_budget = cfg.ls_budget_s
    alt_budget = cfg.alt_budget_s
    if Stage.ALT in sequence and Stage.LS not in sequence and ls_budget is not None and alt_budget is not None:
        alt_budget = ls_budget + alt_budget
    return {Stage.SPO: cfg.spo_budget_s, Stage.LS: ls_budget, Stage.ALT: alt_budget}


def pipeline(
    problem: NominalProblem,
    dataset: Dataset,
    sequence: Sequence[Union[Stage, str]],
    cfg: TrainConfig,
    oracle: Optional[RegretOracle] = None,
    spo: Optional[StageReport] = None,
) -> Tuple[LinearModel, List[StageReport]]:
    """Run the stages in order, each starting from the previous stage's model.

    ``spo`` is a finished SPO stage of an earlier run on the same data; it is
    reused as the first report instead of solving the SPO+ LP again.
    """
    stages = [Stage(s) for s in sequence]
    if not stages or stages[0] is not Stage.SPO:
        raise InvalidParam("A training sequence must start with SPO")
    if Stage.SPO in stages[1:]:
        raise InvalidParam("SPO may only appear as the first stage")
    if spo is not None and (spo.stage != Stage.SPO.value or spo.model is None):
        raise InvalidParam("Only a finished SPO stage with its model can be reused")

    oracle = oracle or RegretOracle(problem, dataset, Split.TRAIN, workers=1)
    budgets = stage_budgets(stages, cfg)
    reports: List[StageReport] = []
    model: Optional[LinearModel] = None

    for stage in stages:
        if stage is Stage.SPO and spo is not None:
            model = spo.model
            reports.append(spo)
            logger.info("stage_reused", stage=stage.value, train_regret=spo.train_regret)
            continue

        tic = time.perf_counter()
        trace = None
        if stage is Stage.SPO:
            deadline = None if budgets[Stage.SPO] is None else tic + budgets[Stage.SPO]
            model, _ = solve_spo_plus_lp(problem, dataset, bias=cfg.bias, oracle=oracle, deadline=deadline)
            value = oracle.value(model)
            iterations, termination = 1, TerminationReason.SOLVED
        elif stage is Stage.LS:
            model, trace = local_search(problem, dataset, model, cfg, oracle=oracle, budget_s=budgets[Stage.LS])
            value, iterations, termination = trace.final, trace.iterations, trace.termination
        else:
            model, trace = alternating(problem, dataset, model, cfg, oracle=oracle, budget_s=budgets[Stage.ALT])
            value, iterations, termination = min(trace.values), trace.iterations, trace.termination

        report = StageReport(
            stage=stage.value,
            train_regret=float(value),
            wall_s=time.perf_counter() - tic,
            iterations=iterations,
            termination=termination,
            trace=trace,
            model=model,
        )
        reports.append(report)
        logger.info(
            "stage_finished",
            stage=stage.value,
            train_regret=report.train_regret,
            wall_s=round(report.wall_s, 3),
            termination=termination.value,
        )

    return model, reports
