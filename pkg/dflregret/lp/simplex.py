"""Two-phase revised simplex with dual certificate recovery.

The LP is first rewritten as  min c'x  s.t.  Ax = b, x >= 0, b >= 0:
variables with a finite lower bound are shifted, upper-only variables are
reflected, free variables are split, and finite upper bounds on shifted
variables become extra rows. Phase 1 minimizes the sum of artificials,
phase 2 the real objective.

A is held in CSC form. The basis inverse is never formed: the basis is
factorized with a sparse LU and every pivot appends an eta column to a
product-form file, which is folded back into a fresh factorization every
``refactor_every`` pivots.
"""

import time
from dataclasses import dataclass, fields
from typing import List, Optional, Tuple

import numpy as np
import scipy.sparse as sp
import structlog
from scipy.sparse.linalg import splu

from dflregret.config import get_config
from dflregret.errors import (
    InfeasibleProblem,
    NumericalFailure,
    TimeBudgetExceeded,
    UnboundedProblem,
)
from dflregret.lp.problem import (
    LPProblem,
    LPSolution,
    LPStatus,
    Sense,
    canonical_layout,
)

logger = structlog.get_logger()

PIVOT_TOL = 1e-9
SINGULAR_TOL = 1e-13


@dataclass(frozen=True)
class SimplexSettings:
    feas_tol: float = 1e-9
    opt_tol: float = 1e-9
    active_tol: float = 1e-7
    iteration_factor: int = 50
    refactor_every: int = 64
    degenerate_switch: int = 50
    deadline_check_every: int = 16

    @classmethod
    def from_config(cls) -> "SimplexSettings":
        """Read the ``lp`` block of the active configuration."""
        lp_cfg = get_config().get("lp", {})
        names = {f.name for f in fields(cls)}
        return cls(**{k: v for k, v in lp_cfg.items() if k in names})


@dataclass
class _StandardForm:
    A: sp.csc_matrix
    b: np.ndarray
    c: np.ndarray
    row_flip: np.ndarray
    col_var: np.ndarray  # original variable behind each structural column
    col_coef: np.ndarray  # +1 / -1 contribution of the column to that variable
    var_col: np.ndarray  # first structural column of each original variable
    bound_row: np.ndarray  # extra row index per variable, -1 when none
    shift: np.ndarray
    n_rows_original: int
    n_struct: int


def _standard_form(lp: LPProblem) -> _StandardForm:
    m, n = lp.n_rows, lp.n_vars
    lower, upper = lp.var_lower, lp.var_upper

    col_var, col_coef = [], []
    var_col = np.zeros(n, dtype=int)
    bound_row = np.full(n, -1, dtype=int)
    shift = np.zeros(n)
    boxed = []
    for k in range(n):
        var_col[k] = len(col_var)
        if np.isfinite(lower[k]):
            shift[k] = lower[k]
            col_var.append(k)
            col_coef.append(1.0)
            if np.isfinite(upper[k]):
                bound_row[k] = m + len(boxed)
                boxed.append(k)
        elif np.isfinite(upper[k]):
            shift[k] = upper[k]
            col_var.append(k)
            col_coef.append(-1.0)
        else:
            col_var.extend([k, k])
            col_coef.extend([1.0, -1.0])
    col_var = np.array(col_var, dtype=int)
    col_coef = np.array(col_coef, dtype=float)
    boxed = np.array(boxed, dtype=int)
    n_struct = len(col_var)

    slack_rows = np.array([r for r, s in enumerate(lp.senses) if s is not Sense.EQ], dtype=int)
    slack_sign = np.array([-1.0 if lp.senses[r] is Sense.GE else 1.0 for r in slack_rows])
    n_slack = len(slack_rows) + len(boxed)
    shape = (m + len(boxed), n_struct + n_slack)

    struct = sp.coo_matrix(lp.matrix[:, col_var] * col_coef, shape=(m, n_struct))
    box_ids = np.arange(len(boxed))
    rows = np.concatenate([struct.row, slack_rows, m + box_ids, m + box_ids]).astype(int)
    cols = np.concatenate([
        struct.col,
        n_struct + np.arange(len(slack_rows)),
        var_col[boxed],
        n_struct + len(slack_rows) + box_ids,
    ]).astype(int)
    data = np.concatenate([struct.data, slack_sign, np.ones(len(boxed)), np.ones(len(boxed))])

    b = np.concatenate([lp.rhs - lp.matrix @ shift, upper[boxed] - lower[boxed]])
    c = np.concatenate([lp.objective[col_var] * col_coef, np.zeros(n_slack)])

    flip = np.where(b < 0, -1.0, 1.0)
    A = sp.csc_matrix((data * flip[rows], (rows, cols)), shape=shape)
    A.eliminate_zeros()
    return _StandardForm(
        A=A, b=b * flip, c=c, row_flip=flip, col_var=col_var, col_coef=col_coef,
        var_col=var_col, bound_row=bound_row, shift=shift,
        n_rows_original=m, n_struct=n_struct,
    )


def _crash_basis(A: sp.csc_matrix, b: np.ndarray) -> np.ndarray:
    """Per row, a singleton column that can be basic there (-1 when none exists).

    A singleton with entry a in row r is usable when b_r / a >= 0; the one
    with the largest |a| wins and slacks win ties.
    """
    m = A.shape[0]
    chosen = np.full(m, -1, dtype=int)
    if m == 0:
        return chosen
    singles = np.flatnonzero(np.diff(A.indptr) == 1)
    rows = A.indices[A.indptr[singles]]
    values = A.data[A.indptr[singles]]
    usable = (values > 0.0) | ((values < 0.0) & (b[rows] == 0.0))
    best = np.zeros(m)
    # slacks sit at the end; scan them first
    for j, r, a in zip(singles[usable][::-1], rows[usable][::-1], values[usable][::-1]):
        if abs(a) > best[r]:
            chosen[r], best[r] = j, abs(a)
    return chosen


class RevisedSimplex:
    """Revised simplex on  min cost'x, Ax = b, x >= 0  from a feasible basis.

    B^-1 = E_k^-1 ... E_1^-1 (LU)^-1, where each E_i differs from the identity
    in the column of the row that left at pivot i. ``deadline`` is a
    ``time.perf_counter()`` instant checked every ``deadline_check_every``
    pivots.
    """

    def __init__(
        self,
        A: sp.csc_matrix,
        b: np.ndarray,
        basis: np.ndarray,
        artificial: np.ndarray,
        settings: SimplexSettings,
        iteration_cap: int,
        deadline: Optional[float] = None,
    ):
        self.A = sp.csc_matrix(A)
        self.AT = self.A.T.tocsr()
        self.b = b
        self.m, self.n_cols = self.A.shape
        self.basis = np.array(basis, dtype=int)
        self.is_basic = np.zeros(self.n_cols, dtype=bool)
        self.is_basic[self.basis] = True
        self.artificial = artificial
        self.settings = settings
        self.iteration_cap = iteration_cap
        self.deadline = deadline
        self.iterations = 0
        self.bland = False
        self._degenerate_run = 0
        self._since_refactor = 0
        self._lu = None
        self._etas: List[Tuple[int, np.ndarray]] = []
        self.feas_eps = settings.feas_tol * max(1.0, float(np.abs(b).max(initial=0.0)))
        self.refactor()

    def refactor(self) -> None:
        self._since_refactor = 0
        self._etas = []
        if self.m == 0:
            self.xB = np.zeros(0)
            return
        try:
            lu = splu(self.A[:, self.basis].tocsc())
        except RuntimeError as e:
            raise NumericalFailure(
                f"basis matrix became singular after {self.iterations} pivots"
            ) from e
        diag = np.abs(lu.U.diagonal())
        if diag.min() <= SINGULAR_TOL * max(1.0, diag.max()):
            raise NumericalFailure(
                f"basis matrix became singular after {self.iterations} pivots"
            )
        self._lu = lu
        xB = lu.solve(np.asarray(self.b, dtype=float))
        xB[(xB < 0.0) & (xB > -self.feas_eps)] = 0.0
        self.xB = xB

    def column(self, j: int) -> np.ndarray:
        col = np.zeros(self.m)
        start, end = self.A.indptr[j], self.A.indptr[j + 1]
        col[self.A.indices[start:end]] = self.A.data[start:end]
        return col

    def ftran(self, column: np.ndarray) -> np.ndarray:
        """B^-1 column."""
        if self.m == 0:
            return np.zeros(0)
        z = self._lu.solve(column)
        for r, alpha in self._etas:
            pivot_value = z[r] / alpha[r]
            z -= pivot_value * alpha
            z[r] = pivot_value
        return z

    def btran(self, row: np.ndarray) -> np.ndarray:
        """row' B^-1."""
        if self.m == 0:
            return np.zeros(0)
        w = np.array(row, dtype=float)
        for r, alpha in reversed(self._etas):
            w[r] = (w[r] - (w @ alpha - w[r] * alpha[r])) / alpha[r]
        return self._lu.solve(w, trans="T")

    def duals(self, cost: np.ndarray) -> np.ndarray:
        return self.btran(cost[self.basis])

    def _out_of_time(self) -> bool:
        if self.deadline is None or self.iterations % self.settings.deadline_check_every:
            return False
        return time.perf_counter() >= self.deadline

    def run(self, cost: np.ndarray, can_enter: np.ndarray, phase: int) -> LPStatus:
        """Pivot until optimal, unbounded or past the deadline for the given cost vector."""
        opt_eps = self.settings.opt_tol * max(1.0, float(np.abs(cost).max(initial=0.0)))
        certified = False
        while True:
            reduced = cost - self.AT @ self.duals(cost)
            candidates = can_enter & ~self.is_basic & (reduced < -opt_eps)
            if not candidates.any():
                if certified:
                    return LPStatus.OPTIMAL
                self.refactor()
                certified = True
                continue
            certified = False

            if self.iterations >= self.iteration_cap:
                raise NumericalFailure(
                    f"simplex exceeded its iteration cap of {self.iteration_cap} pivots"
                )
            if self._out_of_time():
                return LPStatus.TIME_BUDGET

            eligible = np.flatnonzero(candidates)
            if self.bland:
                q = int(eligible[0])
            else:
                q = int(eligible[np.argmin(reduced[eligible])])

            alpha = self.ftran(self.column(q))
            leaving = self._ratio_test(alpha, phase)
            if leaving is None:
                return LPStatus.UNBOUNDED
            r, theta = leaving
            self.pivot(r, q, alpha, theta)

    def _ratio_test(self, alpha: np.ndarray, phase: int) -> Optional[Tuple[int, float]]:
        ratios = np.full(self.m, np.inf)
        positive = alpha > PIVOT_TOL
        ratios[positive] = np.maximum(self.xB[positive], 0.0) / alpha[positive]
        if phase == 2:
            # artificials left basic at zero must not move off zero
            stuck = self.artificial[self.basis] & (np.abs(alpha) > PIVOT_TOL)
            ratios[stuck] = 0.0
        if not np.isfinite(ratios).any():
            return None
        theta = float(ratios.min())
        ties = np.flatnonzero(ratios <= theta + 1e-12 * max(1.0, theta))
        r = int(ties[np.argmin(self.basis[ties])])
        return r, float(ratios[r])

    def pivot(self, r: int, q: int, alpha: np.ndarray, theta: float) -> None:
        self.xB -= theta * alpha
        self.xB[r] = theta
        self.xB[(self.xB < 0.0) & (self.xB > -self.feas_eps)] = 0.0
        self._etas.append((r, alpha))

        self.is_basic[self.basis[r]] = False
        self.is_basic[q] = True
        self.basis[r] = q
        self.iterations += 1

        if theta <= self.feas_eps:
            self._degenerate_run += 1
        else:
            self._degenerate_run = 0
        if not self.bland and self._degenerate_run >= self.settings.degenerate_switch:
            self.bland = True
            logger.debug("simplex_switch_bland", iterations=self.iterations)

        self._since_refactor += 1
        if self._since_refactor >= self.settings.refactor_every:
            self.refactor()

    def drive_out_artificials(self) -> int:
        """Swap zero-valued artificials for structural columns where possible.

        Returns the number of artificials left basic (redundant rows).
        """
        remaining = 0
        for r in range(self.m):
            if not self.artificial[self.basis[r]]:
                continue
            unit = np.zeros(self.m)
            unit[r] = 1.0
            row = self.AT @ self.btran(unit)
            row[self.artificial | self.is_basic] = 0.0
            j = int(np.argmax(np.abs(row)))
            if abs(row[j]) <= 1e-7:
                remaining += 1
                continue
            self.xB[r] = 0.0
            self.pivot(r, j, self.ftran(self.column(j)), 0.0)
        self.refactor()
        return remaining


def solve(
    lp: LPProblem,
    settings: Optional[SimplexSettings] = None,
    deadline: Optional[float] = None,
) -> LPSolution:
    """Solve an LP, reporting status and, when optimal, primal/dual certificates.

    Infeasible and unbounded problems are reported through ``status``, as is
    a ``deadline`` (a ``time.perf_counter()`` instant) passed mid-solve
    (TimeBudget). Only a stalled or singular pivot sequence raises
    (NumericalFailure).
    """
    settings = settings or SimplexSettings.from_config()
    std = _standard_form(lp)
    m, n_cols = std.A.shape

    chosen = _crash_basis(std.A, std.b)
    missing = np.flatnonzero(chosen < 0)
    art = sp.csc_matrix(
        (np.ones(len(missing)), (missing, np.arange(len(missing)))),
        shape=(m, len(missing)),
    )
    A = sp.hstack([std.A, art], format="csc")
    basis = chosen.copy()
    basis[missing] = n_cols + np.arange(len(missing))
    artificial = np.zeros(A.shape[1], dtype=bool)
    artificial[n_cols:] = True

    cap = settings.iteration_factor * max(1, m + n_cols)
    simplex = RevisedSimplex(A, std.b, basis, artificial, settings, cap, deadline=deadline)

    if len(missing):
        phase1_cost = artificial.astype(float)
        status = simplex.run(phase1_cost, np.ones(A.shape[1], dtype=bool), phase=1)
        if status is LPStatus.TIME_BUDGET:
            logger.debug("simplex_time_budget", phase=1, iterations=simplex.iterations)
            return LPSolution(status=LPStatus.TIME_BUDGET, iterations=simplex.iterations)
        infeasibility = float(phase1_cost[simplex.basis] @ simplex.xB)
        if infeasibility > settings.active_tol * max(1.0, float(np.abs(std.b).max(initial=0.0))):
            logger.debug("simplex_infeasible", infeasibility=infeasibility, iterations=simplex.iterations)
            return LPSolution(status=LPStatus.INFEASIBLE, iterations=simplex.iterations)
        redundant = simplex.drive_out_artificials()
        if redundant:
            logger.debug("simplex_redundant_rows", count=redundant)

    cost = np.concatenate([std.c, np.zeros(len(missing))])
    status = simplex.run(cost, ~artificial, phase=2)
    if status is LPStatus.UNBOUNDED:
        logger.debug("simplex_unbounded", iterations=simplex.iterations)
        return LPSolution(status=LPStatus.UNBOUNDED, iterations=simplex.iterations)
    if status is LPStatus.TIME_BUDGET:
        logger.debug("simplex_time_budget", phase=2, iterations=simplex.iterations)
        return LPSolution(status=LPStatus.TIME_BUDGET, iterations=simplex.iterations)

    x = np.zeros(A.shape[1])
    x[simplex.basis] = simplex.xB
    primal = std.shift.copy()
    np.add.at(primal, std.col_var, std.col_coef * x[: std.n_struct])

    y_flipped = simplex.duals(cost)
    reduced = std.c[: std.n_struct] - std.A[:, : std.n_struct].T @ y_flipped
    solution = _certificate(lp, primal, y_flipped * std.row_flip, reduced, std, settings, simplex.iterations)
    logger.debug(
        "simplex_solved",
        rows=m,
        cols=n_cols,
        iterations=simplex.iterations,
        objective=solution.objective,
    )
    return solution


def _certificate(
    lp: LPProblem,
    primal: np.ndarray,
    y: np.ndarray,
    reduced: np.ndarray,
    std: _StandardForm,
    settings: SimplexSettings,
    iterations: int,
) -> LPSolution:
    m = std.n_rows_original
    row_dual = y[:m].copy()
    for r, sense in enumerate(lp.senses):
        if sense is Sense.GE:
            row_dual[r] = max(row_dual[r], 0.0)
        elif sense is Sense.LE:
            row_dual[r] = min(row_dual[r], 0.0)

    lower_dual = np.zeros(lp.n_vars)
    upper_dual = np.zeros(lp.n_vars)
    for k in range(lp.n_vars):
        j = std.var_col[k]
        if np.isfinite(lp.var_lower[k]):
            lower_dual[k] = reduced[j]
            if std.bound_row[k] >= 0:
                upper_dual[k] = -y[std.bound_row[k]]
        elif np.isfinite(lp.var_upper[k]):
            upper_dual[k] = reduced[j]
    lower_dual = np.maximum(lower_dual, 0.0)
    upper_dual = np.maximum(upper_dual, 0.0)

    layout = canonical_layout(lp, split_equalities=True)
    dual = np.concatenate([
        np.maximum(row_dual[layout.row_source] * layout.row_sign, 0.0),
        lower_dual[layout.lower_vars],
        upper_dual[layout.upper_vars],
    ])

    activity = lp.matrix @ primal
    slack = np.concatenate([
        (activity[layout.row_source] - lp.rhs[layout.row_source]) * layout.row_sign,
        primal[layout.lower_vars] - lp.var_lower[layout.lower_vars],
        lp.var_upper[layout.upper_vars] - primal[layout.upper_vars],
    ])
    rhs = np.concatenate([
        lp.rhs[layout.row_source],
        lp.var_lower[layout.lower_vars],
        lp.var_upper[layout.upper_vars],
    ])
    active = np.flatnonzero(np.abs(slack) <= settings.active_tol * np.maximum(1.0, np.abs(rhs)))

    return LPSolution(
        status=LPStatus.OPTIMAL,
        primal=primal,
        dual=dual,
        row_dual=row_dual,
        objective=float(lp.objective @ primal),
        active_rows=tuple(int(i) for i in active),
        iterations=iterations,
    )


def require_optimal(solution: LPSolution, what: str = "LP") -> LPSolution:
    """Return the solution, raising the typed error unless it is Optimal."""
    if solution.status is LPStatus.INFEASIBLE:
        raise InfeasibleProblem(f"{what} is infeasible")
    if solution.status is LPStatus.UNBOUNDED:
        raise UnboundedProblem(f"{what} is unbounded")
    if solution.status is LPStatus.TIME_BUDGET:
        raise TimeBudgetExceeded(f"{what} ran out of time after {solution.iterations} pivots")
    return solution
