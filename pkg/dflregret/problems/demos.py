"""Small hand-checkable polytopes used by the worked examples and tests."""

import numpy as np

from dflregret.errors import InvalidDimension
from dflregret.lp import LPProblem, Sense
from dflregret.problems.polytopes import NominalProblem, ProblemKind


def triangle() -> NominalProblem:
    """{v1 + v2 <= 1, v >= 0}: vertices (0,0), (1,0), (0,1)."""
    polytope = LPProblem(
        objective=np.zeros(2),
        matrix=np.array([[1.0, 1.0]]),
        senses=(Sense.LE,),
        rhs=np.array([1.0]),
        var_lower=np.zeros(2),
    )
    return NominalProblem(kind=ProblemKind.CUSTOM, polytope=polytope, name="triangle")


def unit_box(n: int = 2) -> NominalProblem:
    """[0, 1]^n given only by variable bounds."""
    if n < 1:
        raise InvalidDimension(f"unit_box needs n >= 1, got {n}")
    polytope = LPProblem(
        objective=np.zeros(n),
        matrix=np.zeros((0, n)),
        senses=(),
        rhs=np.zeros(0),
        var_lower=np.zeros(n),
        var_upper=np.ones(n),
    )
    return NominalProblem(kind=ProblemKind.CUSTOM, polytope=polytope, name=f"unit-box-{n}")
