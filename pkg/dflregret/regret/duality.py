"""Sign structure of the dual of the optimal-face LP.

Dualizing  max c'v  s.t. v in V, A'rho = c_hat, c_hat'v <= b'rho  gives
multipliers mu (rows of A), delta (the c_hat equalities) and gamma >= 0:

    A'mu + c_hat gamma = c,   A delta - b gamma >= 0,   mu <= 0.

Rows of A come from the compact canonical form. On EQ rows mu is free and
the delta row is an equality. A row v_k >= 0 turns its delta row into the
bound delta_k >= 0, so it is kept as a variable bound instead of a row.
"""

from dataclasses import dataclass
from typing import Tuple

import numpy as np

from dflregret.lp import Sense
from dflregret.problems import NominalProblem


@dataclass(frozen=True)
class DualStructure:
    matrix: np.ndarray  # A, compact rows x n
    rhs: np.ndarray  # b
    mu_lower: np.ndarray
    mu_upper: np.ndarray
    delta_lower: np.ndarray
    linked_rows: np.ndarray  # rows whose delta constraint stays a row
    linked_senses: Tuple[Sense, ...]

    @property
    def n_mu(self) -> int:
        return self.matrix.shape[0]

    @property
    def n_delta(self) -> int:
        return self.matrix.shape[1]


def dual_structure(problem: NominalProblem) -> DualStructure:
    form = problem.compact_form
    zero_lower = form.zero_lower_rows
    delta_lower = np.full(problem.n, -np.inf)
    delta_lower[form.source[zero_lower]] = 0.0
    linked = np.flatnonzero(~zero_lower)
    return DualStructure(
        matrix=form.matrix,
        rhs=form.rhs,
        mu_lower=np.full(form.n_rows, -np.inf),
        mu_upper=np.where(form.is_equality, np.inf, 0.0),
        delta_lower=delta_lower,
        linked_rows=linked,
        linked_senses=tuple(Sense.EQ if form.is_equality[j] else Sense.GE for j in linked),
    )
