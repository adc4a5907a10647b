"""Deciding whether some linear model has zero pessimistic regret on a dataset.

When every true cost has a unique optimizer v*_i, zero regret is achievable
iff there are omega and multipliers rho_i with

    A' rho_i = omega x_i,   rho_ij >= 1 on rows active at v*_i,   rho_ij = 0 otherwise,

(equality rows of the compact form are always active and their multipliers
are free). The system is a single LP feasibility problem.
"""

from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from enum import Enum
from typing import Any, Dict, List, Optional, Tuple

import numpy as np
import structlog

from dflregret.data import Dataset, Split
from dflregret.errors import InfeasibleProblem, NumericalFailure, UnboundedProblem
from dflregret.lp import LPBuilder, LPStatus, Sense, SimplexSettings, require_optimal, solve
from dflregret.problems import NominalProblem
from dflregret.regret import (
    LinearModel,
    RegretOracle,
    augment_features,
    prediction_operator,
    true_optimum,
)

logger = structlog.get_logger()

UNIQUENESS_TOL = 1e-7
ZERO_REGRET_TOL = 1e-8


class Answer(str, Enum):
    YES = "Yes"
    NO = "No"
    ASSUMPTION_VIOLATED = "AssumptionViolated"


@dataclass(frozen=True, eq=False)
class UniquenessReport:
    unique: bool
    vstar: np.ndarray
    active_set: Tuple[int, ...]  # compact-form rows tight at vstar
    spread: float  # largest max - min of a coordinate over the optimal face

    def to_dict(self) -> Dict[str, Any]:
        return {
            "unique": self.unique,
            "vstar": self.vstar.tolist(),
            "active_set": list(self.active_set),
            "spread": self.spread,
        }


@dataclass(frozen=True, eq=False)
class ZeroRegretVerdict:
    answer: Answer
    certificate: Optional[LinearModel]
    rho: Optional[np.ndarray]
    active_sets: Tuple[Tuple[int, ...], ...]
    uniqueness_report: Tuple[UniquenessReport, ...]
    regret: Optional[float] = None

    def to_dict(self) -> Dict[str, Any]:
        certificate = None
        if self.certificate is not None:
            certificate = {
                "omega": self.certificate.omega.tolist(),
                "bias": self.certificate.bias,
                "rho": self.rho.tolist() if self.rho is not None else None,
            }
        return {
            "answer": self.answer.value,
            "certificate": certificate,
            "regret": self.regret,
            "samples": [report.to_dict() for report in self.uniqueness_report],
        }


def check_uniqueness(
    problem: NominalProblem,
    c: np.ndarray,
    settings: Optional[SimplexSettings] = None,
) -> UniquenessReport:
    """Is argmin c'v over the polytope a single point?

    Minimizes and maximizes every coordinate over the optimal face (the
    polytope plus c'v = z*).
    """
    settings = settings or SimplexSettings.from_config()
    c = np.asarray(c, dtype=float)
    zstar, vstar = true_optimum(problem, c)
    face = problem.polytope.with_rows(c[None, :], [Sense.EQ], [zstar])

    spread = 0.0
    for k in range(problem.n):
        direction = np.zeros(problem.n)
        direction[k] = 1.0
        try:
            low = require_optimal(solve(face.with_objective(direction), settings), what="optimal face")
            high = require_optimal(solve(face.with_objective(-direction), settings), what="optimal face")
        except (InfeasibleProblem, UnboundedProblem) as e:
            raise NumericalFailure(f"optimal face lost its optimum at coordinate {k}: {e}") from e
        spread = max(spread, float(-high.objective - low.objective))

    form = problem.compact_form
    slack = form.matrix @ vstar - form.rhs
    tight = np.abs(slack) <= settings.active_tol * np.maximum(1.0, np.abs(form.rhs))
    active = tuple(int(j) for j in np.flatnonzero(tight | form.is_equality))
    return UniquenessReport(
        unique=spread <= UNIQUENESS_TOL,
        vstar=np.asarray(vstar, dtype=float),
        active_set=active,
        spread=spread,
    )


def _certificate_lp(
    problem: NominalProblem,
    x: np.ndarray,
    reports: List[UniquenessReport],
) -> Tuple[LPBuilder, int]:
    form = problem.compact_form
    k = x.shape[1]
    n_rows = form.n_rows

    builder = LPBuilder()
    builder.add_variables("omega", problem.n * k)
    objective = {}
    for i, report in enumerate(reports):
        active = np.zeros(n_rows, dtype=bool)
        active[list(report.active_set)] = True
        lower = np.where(form.is_equality, -np.inf, np.where(active, 1.0, 0.0))
        upper = np.where(form.is_equality | active, np.inf, 0.0)
        builder.add_variables(f"rho_{i}", n_rows, lower=lower, upper=upper)
        builder.add_rows(
            {f"rho_{i}": form.matrix.T, "omega": -prediction_operator(x[i], problem.n)},
            Sense.EQ,
            0.0,
        )
        objective[f"rho_{i}"] = np.where(form.is_equality, 0.0, 1.0)
    builder.set_objective(objective)
    return builder, k


def zero_regret_certificate(
    problem: NominalProblem,
    dataset: Dataset,
    bias: bool = False,
    split: Split = Split.TRAIN,
    workers: int = 1,
) -> ZeroRegretVerdict:
    """Yes with a certificate model, No, or AssumptionViolated when some optimum is not unique."""
    costs = dataset.costs(split)
    x = augment_features(dataset.features(split), bias)
    n_samples = costs.shape[0]
    settings = SimplexSettings.from_config()

    def _check(i: int) -> UniquenessReport:
        return check_uniqueness(problem, costs[i], settings)

    if workers > 1 and n_samples > 1:
        with ThreadPoolExecutor(max_workers=workers) as executor:
            reports = list(executor.map(_check, range(n_samples)))
    else:
        reports = [_check(i) for i in range(n_samples)]

    active_sets = tuple(r.active_set for r in reports)
    per_sample = tuple(reports)
    if n_samples == 0:
        model = LinearModel(omega=np.zeros((problem.n, x.shape[1])), bias=bias)
        return ZeroRegretVerdict(Answer.YES, model, np.zeros((0, problem.compact_form.n_rows)), (), (), 0.0)
    if not all(r.unique for r in reports):
        violated = [i for i, r in enumerate(reports) if not r.unique]
        logger.warning("zero_regret_assumption_violated", samples=violated[:10], count=len(violated))
        return ZeroRegretVerdict(Answer.ASSUMPTION_VIOLATED, None, None, active_sets, per_sample)

    builder, k = _certificate_lp(problem, x, reports)
    solution = solve(builder.build(), settings)
    if solution.status is LPStatus.INFEASIBLE:
        logger.info("zero_regret_decided", answer=Answer.NO.value, n_samples=n_samples)
        return ZeroRegretVerdict(Answer.NO, None, None, active_sets, per_sample)
    require_optimal(solution, what="zero-regret system")

    omega = builder.extract(solution.primal, "omega").reshape(problem.n, k)
    rho = np.zeros((n_samples, problem.compact_form.n_rows))
    for i in range(n_samples):
        rho[i] = builder.extract(solution.primal, f"rho_{i}")
    certificate = LinearModel(omega=omega, bias=bias)

    oracle = RegretOracle(problem, dataset, split)
    regret = oracle.value(certificate)
    tolerance = ZERO_REGRET_TOL * max(1.0, float(np.mean(np.abs(oracle.zstar))))
    if regret > tolerance:
        raise NumericalFailure(f"zero-regret certificate has regret {regret:.3e}")

    logger.info("zero_regret_decided", answer=Answer.YES.value, n_samples=n_samples, regret=regret)
    return ZeroRegretVerdict(
        answer=Answer.YES,
        certificate=certificate,
        rho=rho,
        active_sets=active_sets,
        uniqueness_report=per_sample,
        regret=regret,
    )
