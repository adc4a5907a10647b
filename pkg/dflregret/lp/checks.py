from typing import Optional

import numpy as np
import structlog

from dflregret.lp.problem import LPProblem, LPStatus
from dflregret.lp.simplex import SimplexSettings, solve

logger = structlog.get_logger()


def assert_bounded_nonempty(lp: LPProblem, settings: Optional[SimplexSettings] = None) -> bool:
    """True iff the feasible region of ``lp`` is non-empty and bounded.

    Feasibility is checked with a zero objective, boundedness by minimizing
    and maximizing every coordinate. The LP's own objective is ignored.
    """
    n = lp.n_vars
    feasibility = solve(lp.with_objective(np.zeros(n)), settings)
    if feasibility.status is not LPStatus.OPTIMAL:
        logger.debug("polytope_empty", n_vars=n, n_rows=lp.n_rows)
        return False

    for k in range(n):
        for direction in (1.0, -1.0):
            objective = np.zeros(n)
            objective[k] = direction
            result = solve(lp.with_objective(objective), settings)
            if result.status is not LPStatus.OPTIMAL:
                logger.debug("polytope_unbounded", coordinate=k, direction=direction)
                return False
    return True
