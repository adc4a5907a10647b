"""Single-level QCQP models of pessimistic-regret training.

Dualizing the inner optimal-face LP of every sample gives one non-convex
problem over (omega, mu, delta, gamma):

    min  sum_i b'mu_i + (omega x_i)'delta_i
    s.t. A'mu_i + (omega x_i) gamma_i = c_i / N
         A delta_i - b gamma_i >= 0          (= 0 on equality rows)
         mu_i <= 0 (free on equality rows), gamma_i >= 0, |omega| <= B

Fixing every gamma_i to kappa gives the penalized slice, whose rows are
linear. Neither model is solved here: they are built, audited against known
points and exported.
"""

from dataclasses import dataclass, field
from enum import Enum
from functools import cached_property
from typing import Any, Dict, List, Mapping, Optional, Tuple

import numpy as np
import structlog

from dflregret.data import Dataset, Split
from dflregret.errors import InfeasibleProblem, InvalidDimension, InvalidParam
from dflregret.lp import LPBuilder, LPStatus, Sense, require_optimal, solve
from dflregret.problems import NominalProblem
from dflregret.regret import LinearModel, RegretOracle, augment_features, dual_structure
from dflregret.training.alternating import Lp1Result, solve_lp1_fixed_omega

logger = structlog.get_logger()

LinearTerms = Tuple[Tuple[str, float], ...]
BilinearTerms = Tuple[Tuple[str, str, float], ...]


class Variant(str, Enum):
    EXACT = "exact"
    PENALIZED = "penalized"


def omega_name(a: int, k: int) -> str:
    return f"w_{a}_{k}"


def mu_name(i: int, j: int) -> str:
    return f"mu_{i}_{j}"


def delta_name(i: int, a: int) -> str:
    return f"d_{i}_{a}"


def gamma_name(i: int) -> str:
    return f"g_{i}"


@dataclass(frozen=True)
class QcqpVariable:
    name: str
    lower: float
    upper: float


@dataclass(frozen=True)
class QcqpRow:
    name: str
    linear: LinearTerms
    bilinear: BilinearTerms
    sense: Sense
    rhs: float

    @property
    def is_bilinear(self) -> bool:
        return bool(self.bilinear)


@dataclass(frozen=True)
class QcqpModel:
    """Named variables, linear/bilinear rows and a bilinear objective (minimized)."""
    variables: Tuple[QcqpVariable, ...]
    rows: Tuple[QcqpRow, ...]
    objective_linear: LinearTerms
    objective_bilinear: BilinearTerms
    metadata: Dict[str, Any] = field(default_factory=dict, compare=False)

    @property
    def n_variables(self) -> int:
        return len(self.variables)

    @property
    def n_rows(self) -> int:
        return len(self.rows)

    @property
    def n_bilinear_rows(self) -> int:
        return sum(1 for row in self.rows if row.is_bilinear)

    @cached_property
    def index(self) -> Dict[str, QcqpVariable]:
        return {v.name: v for v in self.variables}

    def variable(self, name: str) -> QcqpVariable:
        return self.index[name]


@dataclass(frozen=True)
class AuditReport:
    objective: float
    max_row_violation: float
    max_bound_violation: float
    worst_row: Optional[str]

    def feasible(self, tol: float = 1e-6) -> bool:
        return self.max_row_violation <= tol and self.max_bound_violation <= tol

    def to_dict(self) -> Dict[str, Any]:
        return {
            "objective": self.objective,
            "max_row_violation": self.max_row_violation,
            "max_bound_violation": self.max_bound_violation,
            "worst_row": self.worst_row,
        }


def _nonzero(terms: List[Tuple]) -> Tuple:
    return tuple(t for t in terms if t[-1] != 0.0)


def _check_inputs(problem: NominalProblem, dataset: Dataset, omega_bound: float) -> None:
    if dataset.costs(Split.ALL).shape[1] != problem.n:
        raise InvalidDimension(
            f"dataset costs have {dataset.costs(Split.ALL).shape[1]} entries, problem has {problem.n} variables"
        )
    if not omega_bound > 0.0:
        raise InvalidParam(f"omega bound must be positive, got {omega_bound}")


def _build(
    problem: NominalProblem,
    dataset: Dataset,
    omega_bound: float,
    variant: Variant,
    kappa: Optional[float],
    with_cutoff: bool,
    bias: bool,
    split: Split,
) -> QcqpModel:
    _check_inputs(problem, dataset, omega_bound)
    structure = dual_structure(problem)
    x = augment_features(dataset.features(split), bias)
    costs = dataset.costs(split)
    n_samples, k = x.shape
    n = problem.n
    A, b = structure.matrix, structure.rhs
    exact = variant is Variant.EXACT

    variables: List[QcqpVariable] = [
        QcqpVariable(omega_name(a, f), -omega_bound, omega_bound) for a in range(n) for f in range(k)
    ]
    rows: List[QcqpRow] = []
    objective_linear: List[Tuple[str, float]] = []
    objective_bilinear: List[Tuple[str, str, float]] = []

    for i in range(n_samples):
        variables += [
            QcqpVariable(mu_name(i, j), float(structure.mu_lower[j]), float(structure.mu_upper[j]))
            for j in range(structure.n_mu)
        ]
        variables += [QcqpVariable(delta_name(i, a), float(structure.delta_lower[a]), np.inf) for a in range(n)]
        if exact:
            variables.append(QcqpVariable(gamma_name(i), 0.0, np.inf))

        for a in range(n):
            linear = [(mu_name(i, j), float(A[j, a])) for j in range(structure.n_mu)]
            weights = [(omega_name(a, f), float(x[i, f])) for f in range(k)]
            if exact:
                bilinear = [(w, gamma_name(i), coef) for w, coef in weights]
            else:
                linear += [(w, kappa * coef) for w, coef in weights]
                bilinear = []
            rows.append(
                QcqpRow(
                    name=f"stat_{i}_{a}",
                    linear=_nonzero(linear),
                    bilinear=_nonzero(bilinear),
                    sense=Sense.EQ,
                    rhs=float(costs[i, a] / n_samples),
                )
            )

        for j, sense in zip(structure.linked_rows, structure.linked_senses):
            linear = [(delta_name(i, a), float(A[j, a])) for a in range(n)]
            if exact:
                linear.append((gamma_name(i), float(-b[j])))
                rhs = 0.0
            else:
                rhs = float(kappa * b[j])
            rows.append(QcqpRow(name=f"link_{i}_{j}", linear=_nonzero(linear), bilinear=(), sense=sense, rhs=rhs))

        objective_linear += [(mu_name(i, j), float(b[j])) for j in range(structure.n_mu)]
        objective_bilinear += [
            (omega_name(a, f), delta_name(i, a), float(x[i, f])) for a in range(n) for f in range(k)
        ]

    objective_linear = list(_nonzero(objective_linear))
    objective_bilinear = list(_nonzero(objective_bilinear))
    n_constraints = len(rows)
    n_bilinear = sum(1 for row in rows if row.is_bilinear)

    zstar_mean = None
    if with_cutoff:
        zstar = RegretOracle(problem, dataset, split).zstar
        zstar_mean = float(np.mean(zstar)) if len(zstar) else 0.0
        rows.append(
            QcqpRow(
                name="cutoff",
                linear=tuple(objective_linear),
                bilinear=tuple(objective_bilinear),
                sense=Sense.GE,
                rhs=zstar_mean,
            )
        )

    metadata = {
        "variant": variant.value,
        "kappa": kappa,
        "omega_bound": float(omega_bound),
        "cutoff_included": bool(with_cutoff),
        "zstar_mean": zstar_mean,
        "bias": bool(bias),
        "problem": problem.name,
        "counts": {
            "samples": n_samples,
            "features": k,
            "variables": len(variables),
            "constraints": n_constraints,
            "bilinear_rows": n_bilinear,
            "cutoff_rows": int(with_cutoff),
        },
    }
    model = QcqpModel(
        variables=tuple(variables),
        rows=tuple(rows),
        objective_linear=tuple(objective_linear),
        objective_bilinear=tuple(objective_bilinear),
        metadata=metadata,
    )
    logger.info("qcqp_built", variant=variant.value, kappa=kappa, cutoff=with_cutoff, **metadata["counts"])
    return model


def build_exact(
    problem: NominalProblem,
    dataset: Dataset,
    omega_bound: float,
    with_cutoff: bool = True,
    bias: bool = False,
    split: Split = Split.TRAIN,
) -> QcqpModel:
    """Exact single-level model; ``with_cutoff`` adds objective >= mean z*."""
    return _build(problem, dataset, omega_bound, Variant.EXACT, None, with_cutoff, bias, split)


def build_penalized(
    problem: NominalProblem,
    dataset: Dataset,
    kappa: float,
    omega_bound: float,
    bias: bool = False,
    split: Split = Split.TRAIN,
) -> QcqpModel:
    """Restriction of the exact model with every gamma_i fixed to ``kappa``."""
    if not kappa > 0.0:
        raise InvalidParam(f"kappa must be positive, got {kappa}")
    return _build(problem, dataset, omega_bound, Variant.PENALIZED, float(kappa), False, bias, split)


def warm_point(
    problem: NominalProblem,
    dataset: Dataset,
    model: LinearModel,
    lp1: Optional[Lp1Result] = None,
    split: Split = Split.TRAIN,
) -> Dict[str, float]:
    """(omega, LP1 duals of omega) as a point of the exact model."""
    lp1 = lp1 or solve_lp1_fixed_omega(problem, dataset, model, split)
    duals = lp1.duals
    point: Dict[str, float] = {}
    for a in range(model.n):
        for f in range(model.k):
            point[omega_name(a, f)] = float(model.omega[a, f])
    for i in range(duals.mu.shape[0]):
        point.update({mu_name(i, j): float(v) for j, v in enumerate(duals.mu[i])})
        point.update({delta_name(i, a): float(v) for a, v in enumerate(duals.delta[i])})
        point[gamma_name(i)] = float(duals.gamma[i])
    return point


def penalized_point(
    problem: NominalProblem,
    dataset: Dataset,
    model: LinearModel,
    kappa: float,
    split: Split = Split.TRAIN,
) -> Dict[str, float]:
    """Best (mu, delta) of the penalized slice at a fixed omega.

    With omega fixed the slice splits into one LP per sample; on a bounded
    polytope each of them is feasible, so InfeasibleProblem signals bad data.
    """
    if not kappa > 0.0:
        raise InvalidParam(f"kappa must be positive, got {kappa}")
    structure = dual_structure(problem)
    costs = dataset.costs(split)
    chat = model.predict(dataset.features(split))
    n_samples = costs.shape[0]

    point = {omega_name(a, f): float(model.omega[a, f]) for a in range(model.n) for f in range(model.k)}
    for i in range(n_samples):
        builder = LPBuilder()
        builder.add_variables("mu", structure.n_mu, lower=structure.mu_lower, upper=structure.mu_upper)
        builder.add_variables("delta", structure.n_delta, lower=structure.delta_lower)
        builder.add_rows({"mu": structure.matrix.T}, Sense.EQ, costs[i] / n_samples - kappa * chat[i])
        if len(structure.linked_rows):
            builder.add_rows(
                {"delta": structure.matrix[structure.linked_rows]},
                structure.linked_senses,
                kappa * structure.rhs[structure.linked_rows],
            )
        builder.set_objective({"mu": structure.rhs, "delta": chat[i]})
        solution = solve(builder.build())
        if solution.status is LPStatus.INFEASIBLE:
            raise InfeasibleProblem(f"penalized slice with kappa={kappa} has no point for sample {i}")
        require_optimal(solution, what=f"penalized slice sample {i}")
        point.update({mu_name(i, j): float(v) for j, v in enumerate(builder.extract(solution.primal, "mu"))})
        point.update({delta_name(i, a): float(v) for a, v in enumerate(builder.extract(solution.primal, "delta"))})
    return point


def _evaluate(linear: LinearTerms, bilinear: BilinearTerms, point: Mapping[str, float]) -> float:
    value = sum(coef * point[name] for name, coef in linear)
    value += sum(coef * point[a] * point[b] for a, b, coef in bilinear)
    return float(value)


def audit(model: QcqpModel, point: Mapping[str, float]) -> AuditReport:
    """Objective value and worst row/bound violations of ``point``."""
    missing = [v.name for v in model.variables if v.name not in point]
    if missing:
        raise InvalidParam(f"point is missing {len(missing)} variables, e.g. {missing[0]}")

    bound_violation = 0.0
    for var in model.variables:
        value = point[var.name]
        bound_violation = max(bound_violation, var.lower - value, value - var.upper)

    row_violation, worst = 0.0, None
    for row in model.rows:
        lhs = _evaluate(row.linear, row.bilinear, point)
        if row.sense is Sense.EQ:
            violation = abs(lhs - row.rhs)
        elif row.sense is Sense.GE:
            violation = row.rhs - lhs
        else:
            violation = lhs - row.rhs
        if violation > row_violation:
            row_violation, worst = violation, row.name

    return AuditReport(
        objective=_evaluate(model.objective_linear, model.objective_bilinear, point),
        max_row_violation=float(row_violation),
        max_bound_violation=float(max(bound_violation, 0.0)),
        worst_row=worst,
    )


def map_penalized_to_exact(penalized: QcqpModel, point: Mapping[str, float]) -> Dict[str, float]:
    """Lift a penalized-slice point to the exact model by setting gamma_i = kappa."""
    if penalized.metadata.get("variant") != Variant.PENALIZED.value:
        raise InvalidParam("expected a penalized model")
    kappa = float(penalized.metadata["kappa"])
    lifted = dict(point)
    for i in range(penalized.metadata["counts"]["samples"]):
        lifted[gamma_name(i)] = kappa
    return lifted
