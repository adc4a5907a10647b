"""Linear program values, solutions and the canonical "Av >= b" form."""

from dataclasses import dataclass, field
from enum import Enum
from typing import Iterator, Optional, Sequence, Tuple, Union

import numpy as np

from dflregret.errors import MalformedProblem

Number = Union[int, float]


class Sense(str, Enum):
    GE = "GE"
    LE = "LE"
    EQ = "EQ"


class LPStatus(str, Enum):
    OPTIMAL = "Optimal"
    INFEASIBLE = "Infeasible"
    UNBOUNDED = "Unbounded"
    TIME_BUDGET = "TimeBudget"


def _frozen(array: np.ndarray) -> np.ndarray:
    array = np.array(array, dtype=float)
    array.setflags(write=False)
    return array


@dataclass(frozen=True)
class LPProblem:
    """min objective @ v  s.t.  matrix[r] @ v (sense_r) rhs[r],  var_lower <= v <= var_upper.

    Rows are stored as one dense matrix; ``rows`` yields the (coefficients,
    sense, rhs) triples. Missing bounds mean unbounded (+/- inf).
    """
    objective: np.ndarray
    matrix: np.ndarray
    senses: Tuple[Sense, ...]
    rhs: np.ndarray
    var_lower: Optional[np.ndarray] = None
    var_upper: Optional[np.ndarray] = None

    def __post_init__(self):
        objective = np.asarray(self.objective, dtype=float)
        if objective.ndim != 1:
            raise MalformedProblem(f"objective must be a vector, got shape {objective.shape}")
        n = objective.shape[0]

        matrix = np.asarray(self.matrix, dtype=float)
        if matrix.size == 0:
            matrix = matrix.reshape(0, n)
        if matrix.ndim != 2 or matrix.shape[1] != n:
            raise MalformedProblem(
                f"row coefficients must have length n_vars={n}, got matrix shape {matrix.shape}"
            )
        m = matrix.shape[0]

        try:
            senses = tuple(Sense(s) for s in self.senses)
        except ValueError as e:
            raise MalformedProblem(str(e)) from e
        if len(senses) != m:
            raise MalformedProblem(f"{len(senses)} senses for {m} rows")

        rhs = np.asarray(self.rhs, dtype=float).reshape(-1)
        if rhs.shape[0] != m:
            raise MalformedProblem(f"{rhs.shape[0]} right-hand sides for {m} rows")

        lower = np.full(n, -np.inf) if self.var_lower is None else np.asarray(self.var_lower, dtype=float)
        upper = np.full(n, np.inf) if self.var_upper is None else np.asarray(self.var_upper, dtype=float)
        if lower.shape != (n,) or upper.shape != (n,):
            raise MalformedProblem(f"bounds must have length n_vars={n}")
        if np.any(lower > upper):
            raise MalformedProblem("a variable lower bound exceeds its upper bound")
        if np.isnan(matrix).any() or np.isnan(rhs).any() or np.isnan(objective).any():
            raise MalformedProblem("LP data contains NaN")
        if np.isinf(matrix).any() or np.isinf(rhs).any() or np.isinf(objective).any():
            raise MalformedProblem("LP coefficients must be finite")
        if np.isposinf(lower).any() or np.isneginf(upper).any():
            raise MalformedProblem("lower bounds cannot be +inf nor upper bounds -inf")

        object.__setattr__(self, "objective", _frozen(objective))
        object.__setattr__(self, "matrix", _frozen(matrix))
        object.__setattr__(self, "senses", senses)
        object.__setattr__(self, "rhs", _frozen(rhs))
        object.__setattr__(self, "var_lower", _frozen(lower))
        object.__setattr__(self, "var_upper", _frozen(upper))

    @classmethod
    def from_rows(
        cls,
        objective: Sequence[Number],
        rows: Sequence[Tuple[Sequence[Number], Union[Sense, str], Number]],
        var_lower: Optional[Sequence[Number]] = None,
        var_upper: Optional[Sequence[Number]] = None,
    ) -> "LPProblem":
        """Build from a list of (coefficients, sense, rhs) triples."""
        n = len(objective)
        for i, (coeffs, _, _) in enumerate(rows):
            if len(coeffs) != n:
                raise MalformedProblem(f"row {i} has {len(coeffs)} coefficients, expected {n}")
        matrix = np.array([r[0] for r in rows], dtype=float).reshape(len(rows), n)
        return cls(
            objective=np.asarray(objective, dtype=float),
            matrix=matrix,
            senses=tuple(Sense(r[1]) for r in rows),
            rhs=np.array([r[2] for r in rows], dtype=float),
            var_lower=None if var_lower is None else np.asarray(var_lower, dtype=float),
            var_upper=None if var_upper is None else np.asarray(var_upper, dtype=float),
        )

    def __eq__(self, other):
        if not isinstance(other, LPProblem):
            return NotImplemented
        return self.senses == other.senses and all(
            np.array_equal(a, b)
            for a, b in [
                (self.objective, other.objective),
                (self.matrix, other.matrix),
                (self.rhs, other.rhs),
                (self.var_lower, other.var_lower),
                (self.var_upper, other.var_upper),
            ]
        )

    __hash__ = None

    @property
    def n_vars(self) -> int:
        return self.objective.shape[0]

    @property
    def n_rows(self) -> int:
        return self.matrix.shape[0]

    @property
    def rows(self) -> Iterator[Tuple[np.ndarray, Sense, float]]:
        for r in range(self.n_rows):
            yield self.matrix[r], self.senses[r], float(self.rhs[r])

    def with_objective(self, objective: Sequence[Number]) -> "LPProblem":
        """Same feasible set, new objective."""
        return LPProblem(
            objective=np.asarray(objective, dtype=float),
            matrix=self.matrix,
            senses=self.senses,
            rhs=self.rhs,
            var_lower=self.var_lower,
            var_upper=self.var_upper,
        )

    def with_rows(
        self,
        matrix: np.ndarray,
        senses: Sequence[Union[Sense, str]],
        rhs: Sequence[Number],
    ) -> "LPProblem":
        """Append rows, keeping objective and bounds."""
        matrix = np.asarray(matrix, dtype=float).reshape(-1, self.n_vars)
        return LPProblem(
            objective=self.objective,
            matrix=np.vstack([self.matrix, matrix]),
            senses=self.senses + tuple(Sense(s) for s in senses),
            rhs=np.concatenate([self.rhs, np.asarray(rhs, dtype=float).reshape(-1)]),
            var_lower=self.var_lower,
            var_upper=self.var_upper,
        )

    def is_feasible_point(self, v: np.ndarray, tol: float = 1e-9) -> bool:
        """True if v satisfies every row and bound within tol."""
        v = np.asarray(v, dtype=float)
        activity = self.matrix @ v
        for r, sense in enumerate(self.senses):
            gap = activity[r] - self.rhs[r]
            if sense is Sense.GE and gap < -tol:
                return False
            if sense is Sense.LE and gap > tol:
                return False
            if sense is Sense.EQ and abs(gap) > tol:
                return False
        return bool(np.all(v >= self.var_lower - tol) and np.all(v <= self.var_upper + tol))


@dataclass(frozen=True)
class CanonicalLayout:
    """Row order of the canonical form without materializing its matrix.

    Canonical rows come in three groups, in this order:
      1. original rows (GE kept, LE negated, EQ split into a +/- pair, or kept
         once as a free-sign row in the compact form),
      2. finite lower bounds  v_k >= l_k,
      3. finite upper bounds -v_k >= -u_k.
    """
    row_source: np.ndarray  # original row index for group-1 rows
    row_sign: np.ndarray  # +1 / -1 applied to the original row
    row_is_equality: np.ndarray  # compact form only: free-sign multiplier
    lower_vars: np.ndarray
    upper_vars: np.ndarray

    @property
    def n_rows(self) -> int:
        return len(self.row_source) + len(self.lower_vars) + len(self.upper_vars)

    @property
    def n_row_block(self) -> int:
        return len(self.row_source)


def canonical_layout(lp: LPProblem, split_equalities: bool = True) -> CanonicalLayout:
    source, sign, is_eq = [], [], []
    for r, sense in enumerate(lp.senses):
        if sense is Sense.GE:
            source.append(r); sign.append(1.0); is_eq.append(False)
        elif sense is Sense.LE:
            source.append(r); sign.append(-1.0); is_eq.append(False)
        elif split_equalities:
            source.extend([r, r]); sign.extend([1.0, -1.0]); is_eq.extend([False, False])
        else:
            source.append(r); sign.append(1.0); is_eq.append(True)
    return CanonicalLayout(
        row_source=np.array(source, dtype=int),
        row_sign=np.array(sign, dtype=float),
        row_is_equality=np.array(is_eq, dtype=bool),
        lower_vars=np.flatnonzero(np.isfinite(lp.var_lower)),
        upper_vars=np.flatnonzero(np.isfinite(lp.var_upper)),
    )


@dataclass(frozen=True)
class CanonicalForm:
    """Materialized canonical rows: matrix @ v >= rhs (or == for free-sign rows)."""
    matrix: np.ndarray
    rhs: np.ndarray
    is_equality: np.ndarray
    kinds: Tuple[str, ...]  # "row" | "lower" | "upper"
    source: np.ndarray  # original row index or variable index
    objective: np.ndarray

    @property
    def n_rows(self) -> int:
        return self.matrix.shape[0]

    @property
    def bound_rows(self) -> np.ndarray:
        """Mask of rows lifted from variable bounds."""
        return np.array([k != "row" for k in self.kinds], dtype=bool)

    @property
    def zero_lower_rows(self) -> np.ndarray:
        """Mask of rows that encode a v_k >= 0 bound."""
        return np.array(
            [k == "lower" and self.rhs[i] == 0.0 for i, k in enumerate(self.kinds)],
            dtype=bool,
        )

    def to_problem(self) -> LPProblem:
        """The canonical LP with no variable bounds."""
        senses = tuple(Sense.EQ if eq else Sense.GE for eq in self.is_equality)
        return LPProblem(
            objective=self.objective,
            matrix=self.matrix,
            senses=senses,
            rhs=self.rhs,
        )


def canonicalize(lp: LPProblem, split_equalities: bool = True) -> CanonicalForm:
    """Lift bounds into rows and normalize senses.

    With ``split_equalities`` every EQ row becomes a GE pair, giving the pure
    "Av >= b" form; applying it to its own output returns the same rows.
    Without it, EQ rows are kept once and flagged as free-sign rows (compact form).
    """
    layout = canonical_layout(lp, split_equalities=split_equalities)
    n = lp.n_vars

    blocks = [lp.matrix[layout.row_source] * layout.row_sign[:, None]]
    rhs = [lp.rhs[layout.row_source] * layout.row_sign]
    lower_rows = np.zeros((len(layout.lower_vars), n))
    lower_rows[np.arange(len(layout.lower_vars)), layout.lower_vars] = 1.0
    upper_rows = np.zeros((len(layout.upper_vars), n))
    upper_rows[np.arange(len(layout.upper_vars)), layout.upper_vars] = -1.0
    blocks += [lower_rows, upper_rows]
    rhs += [lp.var_lower[layout.lower_vars], -lp.var_upper[layout.upper_vars]]

    kinds = (
        ("row",) * layout.n_row_block
        + ("lower",) * len(layout.lower_vars)
        + ("upper",) * len(layout.upper_vars)
    )
    is_eq = np.concatenate([
        layout.row_is_equality,
        np.zeros(len(layout.lower_vars) + len(layout.upper_vars), dtype=bool),
    ])
    return CanonicalForm(
        matrix=_frozen(np.vstack(blocks)),
        rhs=_frozen(np.concatenate(rhs)),
        is_equality=is_eq,
        kinds=kinds,
        source=np.concatenate([layout.row_source, layout.lower_vars, layout.upper_vars]).astype(int),
        objective=lp.objective,
    )


@dataclass(frozen=True)
class LPSolution:
    """Primal/dual certificate of a solve.

    ``dual`` is aligned with the split canonical rows (every entry >= 0);
    ``row_dual`` is aligned with the original rows (GE >= 0, LE <= 0, EQ free,
    equal to the difference of the split pair).
    """
    status: LPStatus
    primal: np.ndarray = field(default_factory=lambda: np.zeros(0))
    dual: np.ndarray = field(default_factory=lambda: np.zeros(0))
    row_dual: np.ndarray = field(default_factory=lambda: np.zeros(0))
    objective: float = float("nan")
    active_rows: Tuple[int, ...] = ()
    iterations: int = 0

    @property
    def is_optimal(self) -> bool:
        return self.status is LPStatus.OPTIMAL
