"""Exact regret of a linear model over the optimal face of each prediction.

For a prediction c_hat the optimal face V*(c_hat) is described by primal
feasibility, dual feasibility (A' rho = c_hat) and the strong-duality row
c_hat'v <= b'rho. Pessimistic regret maximizes the true cost c'v over that
face, optimistic regret minimizes it; both subtract z*(c).
"""

from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from enum import Enum
from threading import Lock
from typing import Any, Dict, Optional, Tuple

import numpy as np
import structlog

from dflregret.data import Dataset, Split
from dflregret.errors import DegenerateNormalization
from dflregret.lp import LPBuilder, LPProblem, Sense, require_optimal, solve
from dflregret.problems import NominalProblem
from dflregret.regret.models import LinearModel

logger = structlog.get_logger()

NORMALIZATION_EPS = 1e-12


class RegretMode(str, Enum):
    PESSIMISTIC = "pessimistic"
    OPTIMISTIC = "optimistic"


@dataclass(frozen=True, eq=False)
class RegretReport:
    per_sample_regret: np.ndarray
    per_sample_zstar: np.ndarray
    mode: RegretMode

    @property
    def mean_regret(self) -> float:
        if len(self.per_sample_regret) == 0:
            return 0.0
        return float(np.mean(self.per_sample_regret))

    @property
    def normalized_regret(self) -> Optional[float]:
        """``normalize(self)``, or None when the normalization is degenerate."""
        try:
            return normalize(self)
        except DegenerateNormalization:
            return None

    def to_dict(self) -> Dict[str, Any]:
        return {
            "mode": self.mode.value,
            "mean_regret": self.mean_regret,
            "normalized_regret": self.normalized_regret,
            "per_sample_regret": self.per_sample_regret.tolist(),
            "per_sample_zstar": self.per_sample_zstar.tolist(),
        }


def normalize(report: RegretReport) -> float:
    """Total regret divided by |total true optimal value|."""
    total_zstar = float(np.sum(report.per_sample_zstar))
    if abs(total_zstar) < NORMALIZATION_EPS:
        raise DegenerateNormalization(
            f"sum of true optimal values is {total_zstar:.3e}; cannot normalize"
        )
    return float(np.sum(report.per_sample_regret)) / abs(total_zstar)


def true_optimum(problem: NominalProblem, c: np.ndarray) -> Tuple[float, np.ndarray]:
    """z*(c) and an optimal vertex v*(c)."""
    solution = require_optimal(
        solve(problem.polytope.with_objective(np.asarray(c, dtype=float))),
        what="nominal problem",
    )
    return solution.objective, solution.primal


def optimal_face_lp(problem: NominalProblem, chat: np.ndarray, objective: np.ndarray) -> Tuple[LPProblem, LPBuilder]:
    """LP over {(v, rho): v in V, A'rho = chat, chat'v <= b'rho} minimizing objective'v.

    Rows of A come from the compact canonical form: multipliers of EQ rows are
    free, all others are nonnegative.
    """
    form = problem.compact_form
    polytope = problem.polytope
    chat = np.asarray(chat, dtype=float)

    builder = LPBuilder()
    builder.add_variables("v", problem.n, lower=polytope.var_lower, upper=polytope.var_upper)
    builder.add_variables("rho", form.n_rows, lower=np.where(form.is_equality, -np.inf, 0.0))
    if polytope.n_rows:
        builder.add_rows({"v": polytope.matrix}, polytope.senses, polytope.rhs)
    builder.add_rows({"rho": form.matrix.T}, Sense.EQ, chat)
    builder.add_rows({"v": chat[None, :], "rho": -form.rhs[None, :]}, Sense.LE, 0.0)
    builder.set_objective({"v": objective})
    return builder.build(), builder


def scale_prediction(chat: np.ndarray) -> np.ndarray:
    """chat / max|chat|; the optimal face is invariant under positive scaling."""
    chat = np.asarray(chat, dtype=float)
    peak = float(np.max(np.abs(chat), initial=0.0))
    return chat / peak if peak > 0.0 else np.zeros_like(chat)


def sample_regret(
    problem: NominalProblem,
    c: np.ndarray,
    chat: np.ndarray,
    zstar: float,
    mode: RegretMode = RegretMode.PESSIMISTIC,
) -> float:
    """Regret of deciding with ``chat`` when the true cost is ``c``."""
    c = np.asarray(c, dtype=float)
    objective = -c if mode is RegretMode.PESSIMISTIC else c
    lp, builder = optimal_face_lp(problem, scale_prediction(chat), objective)
    solution = require_optimal(solve(lp), what="optimal-face LP")
    v = builder.extract(solution.primal, "v")
    return float(c @ v) - zstar


class RegretOracle:
    """Evaluates regret of models on one split of a dataset.

    z*(c) and v*(c) are computed once per sample and cached. ``evaluations``
    counts model evaluations (one per ``report``/``value`` call).
    """

    def __init__(
        self,
        problem: NominalProblem,
        dataset: Dataset,
        split: Split = Split.TRAIN,
        workers: int = 1,
    ):
        self.problem = problem
        self.split = Split(split)
        self.features = dataset.features(self.split)
        self.costs = dataset.costs(self.split)
        self.workers = max(1, int(workers))
        self.evaluations = 0
        self._lock = Lock()
        self._optima: Optional[Tuple[np.ndarray, np.ndarray]] = None

    @property
    def n_samples(self) -> int:
        return self.costs.shape[0]

    def _optimum_table(self) -> Tuple[np.ndarray, np.ndarray]:
        with self._lock:
            if self._optima is None:
                optima = self._map(lambda i: true_optimum(self.problem, self.costs[i]))
                zstar = np.array([z for z, _ in optima], dtype=float)
                vstar = np.array([v for _, v in optima], dtype=float).reshape(self.n_samples, self.problem.n)
                self._optima = (zstar, vstar)
            return self._optima

    @property
    def zstar(self) -> np.ndarray:
        return self._optimum_table()[0]

    @property
    def vstar(self) -> np.ndarray:
        return self._optimum_table()[1]

    def _map(self, fn):
        indices = range(self.n_samples)
        if self.workers == 1 or self.n_samples <= 1:
            return [fn(i) for i in indices]
        with ThreadPoolExecutor(max_workers=self.workers) as executor:
            return list(executor.map(fn, indices))

    def report(self, model: LinearModel, mode: RegretMode = RegretMode.PESSIMISTIC) -> RegretReport:
        model.check_dimensions(self.problem.n, self.features.shape[1])
        mode = RegretMode(mode)
        chat = model.predict(self.features) if self.n_samples else np.zeros((0, self.problem.n))
        zstar = self.zstar
        regrets = self._map(
            lambda i: sample_regret(self.problem, self.costs[i], chat[i], zstar[i], mode)
        )
        with self._lock:
            self.evaluations += 1
        report = RegretReport(
            per_sample_regret=np.array(regrets, dtype=float),
            per_sample_zstar=zstar.copy(),
            mode=mode,
        )
        logger.debug("regret_evaluated", mode=mode.value, mean_regret=report.mean_regret, split=self.split.value)
        return report

    def value(self, model: LinearModel) -> float:
        """Lambda(omega): mean pessimistic regret."""
        return self.report(model, RegretMode.PESSIMISTIC).mean_regret


def pessimistic_regret(
    problem: NominalProblem,
    dataset: Dataset,
    split: Split,
    model: LinearModel,
    workers: int = 1,
) -> RegretReport:
    return RegretOracle(problem, dataset, split, workers=workers).report(model, RegretMode.PESSIMISTIC)


def optimistic_regret(
    problem: NominalProblem,
    dataset: Dataset,
    split: Split,
    model: LinearModel,
    workers: int = 1,
) -> RegretReport:
    return RegretOracle(problem, dataset, split, workers=workers).report(model, RegretMode.OPTIMISTIC)
