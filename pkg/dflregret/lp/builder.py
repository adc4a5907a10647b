"""Block-structured assembly of dense LPs."""

from dataclasses import dataclass
from typing import Dict, List, Mapping, Sequence, Union

import numpy as np

from dflregret.errors import MalformedProblem
from dflregret.lp.problem import LPProblem, Sense

SenseLike = Union[Sense, str]


@dataclass(frozen=True)
class VariableBlock:
    name: str
    start: int
    size: int

    @property
    def slice(self) -> slice:
        return slice(self.start, self.start + self.size)


class LPBuilder:
    """Collects named variable blocks and rows written per block.

    Example:
        builder = LPBuilder()
        builder.add_variables("omega", 4)
        builder.add_variables("rho", 3, lower=0.0)
        builder.add_rows({"omega": M, "rho": R}, Sense.EQ, rhs)
        builder.set_objective({"rho": -b})
        lp = builder.build()
    """

    def __init__(self):
        self._blocks: Dict[str, VariableBlock] = {}
        self._lower: List[np.ndarray] = []
        self._upper: List[np.ndarray] = []
        self._row_terms: List[Dict[str, np.ndarray]] = []
        self._row_senses: List[Sense] = []
        self._row_rhs: List[np.ndarray] = []
        self._objective: Dict[str, np.ndarray] = {}
        self.n_vars = 0
        self.n_rows = 0

    def add_variables(
        self,
        name: str,
        size: int,
        lower: Union[float, Sequence[float]] = -np.inf,
        upper: Union[float, Sequence[float]] = np.inf,
    ) -> VariableBlock:
        if name in self._blocks:
            raise MalformedProblem(f"variable block {name!r} already exists")
        block = VariableBlock(name=name, start=self.n_vars, size=int(size))
        self._blocks[name] = block
        self._lower.append(np.broadcast_to(np.asarray(lower, dtype=float), (block.size,)).copy())
        self._upper.append(np.broadcast_to(np.asarray(upper, dtype=float), (block.size,)).copy())
        self.n_vars += block.size
        return block

    def block(self, name: str) -> VariableBlock:
        return self._blocks[name]

    def add_rows(
        self,
        terms: Mapping[str, np.ndarray],
        sense: Union[SenseLike, Sequence[SenseLike]],
        rhs: Union[float, Sequence[float]],
    ) -> range:
        """Append rows given as coefficient matrices per variable block.

        Every matrix in ``terms`` must have shape (k, block.size) for the same k.
        Returns the range of the new row indices.
        """
        matrices = {}
        k = None
        for name, coeffs in terms.items():
            block = self._blocks[name]
            coeffs = np.atleast_2d(np.asarray(coeffs, dtype=float))
            if coeffs.shape[1] != block.size:
                raise MalformedProblem(
                    f"block {name!r} has {block.size} variables, got {coeffs.shape[1]} coefficients"
                )
            if k is None:
                k = coeffs.shape[0]
            elif coeffs.shape[0] != k:
                raise MalformedProblem("row blocks disagree on the number of rows")
            matrices[name] = coeffs
        if k is None:
            raise MalformedProblem("rows need at least one block of coefficients")

        if isinstance(sense, (Sense, str)):
            senses = [Sense(sense)] * k
        else:
            senses = [Sense(s) for s in sense]
        rhs = np.broadcast_to(np.asarray(rhs, dtype=float), (k,)).copy()
        if len(senses) != k:
            raise MalformedProblem(f"{len(senses)} senses for {k} rows")

        self._row_terms.append(matrices)
        self._row_senses.extend(senses)
        self._row_rhs.append(rhs)
        start = self.n_rows
        self.n_rows += k
        return range(start, self.n_rows)

    def set_objective(self, terms: Mapping[str, np.ndarray]) -> None:
        self._objective = {name: np.asarray(c, dtype=float).reshape(-1) for name, c in terms.items()}

    def build(self) -> LPProblem:
        objective = np.zeros(self.n_vars)
        for name, coeffs in self._objective.items():
            objective[self._blocks[name].slice] = coeffs

        matrix = np.zeros((self.n_rows, self.n_vars))
        row = 0
        for matrices in self._row_terms:
            k = next(iter(matrices.values())).shape[0]
            for name, coeffs in matrices.items():
                matrix[row:row + k, self._blocks[name].slice] = coeffs
            row += k

        return LPProblem(
            objective=objective,
            matrix=matrix,
            senses=tuple(self._row_senses),
            rhs=np.concatenate(self._row_rhs) if self._row_rhs else np.zeros(0),
            var_lower=np.concatenate(self._lower) if self._lower else np.zeros(0),
            var_upper=np.concatenate(self._upper) if self._upper else np.zeros(0),
        )

    def extract(self, vector: np.ndarray, name: str) -> np.ndarray:
        """The entries of ``vector`` belonging to block ``name``."""
        return np.asarray(vector)[self._blocks[name].slice]
