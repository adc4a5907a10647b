"""Nominal problems: the feasible polytope V plus its graph metadata."""

from dataclasses import dataclass, field
from enum import Enum
from functools import cached_property
from typing import Any, Dict, Tuple

import numpy as np
import structlog

from dflregret.errors import InvalidDimension, InvalidParam, SchemaError
from dflregret.lp import LPProblem, Sense, assert_bounded_nonempty, canonicalize
from dflregret.lp.problem import CanonicalForm

logger = structlog.get_logger()


class ProblemKind(str, Enum):
    SHORTEST_PATH = "ShortestPathGrid"
    MATCHING = "BipartiteMatching"
    CUSTOM = "Custom"


@dataclass(frozen=True)
class NominalProblem:
    """min c'v over the polytope V, with costs supplied per sample.

    ``edges`` fixes the coordinate order of v and c. ``negated_weights`` is set
    for matching: weights are stored negated so every problem is a minimization.
    """
    kind: ProblemKind
    polytope: LPProblem
    edges: Tuple[Tuple[int, int], ...] = ()
    nodes: Tuple[int, ...] = ()
    negated_weights: bool = False
    name: str = ""
    params: Dict[str, Any] = field(default_factory=dict)

    @property
    def n(self) -> int:
        return self.polytope.n_vars

    @cached_property
    def compact_form(self) -> CanonicalForm:
        """Canonical rows with EQ rows kept as free-sign rows."""
        return canonicalize(self.polytope, split_equalities=False)

    def describe(self) -> Dict[str, Any]:
        """JSON-ready descriptor; ``from_descriptor`` rebuilds the problem from it."""
        descriptor: Dict[str, Any] = {"kind": self.kind.value}
        if self.kind is ProblemKind.CUSTOM:
            descriptor["name"] = self.name
            descriptor["polytope"] = polytope_to_dict(self.polytope)
        else:
            descriptor.update(self.params)
        return descriptor

    @classmethod
    def from_descriptor(cls, descriptor: Dict[str, Any]) -> "NominalProblem":
        kind = descriptor.get("kind")
        if kind == ProblemKind.SHORTEST_PATH.value:
            return grid_shortest_path(int(descriptor["rows"]), int(descriptor["cols"]))
        if kind == ProblemKind.MATCHING.value:
            return bipartite_matching(
                int(descriptor["n_left"]),
                int(descriptor["n_right"]),
                int(descriptor["n_edges"]),
                int(descriptor["seed"]),
            )
        if kind == ProblemKind.CUSTOM.value:
            return cls.custom(
                polytope_from_dict(descriptor["polytope"]),
                name=descriptor.get("name", "custom"),
                validate=False,
            )
        raise SchemaError(f"Unknown problem kind: {kind!r}")

    @classmethod
    def custom(cls, lp: LPProblem, name: str = "custom", validate: bool = True) -> "NominalProblem":
        """Wrap a user polytope; the objective of ``lp`` is dropped."""
        polytope = lp.with_objective(np.zeros(lp.n_vars))
        if validate and not assert_bounded_nonempty(polytope):
            raise InvalidParam(f"Polytope {name!r} must be non-empty and bounded")
        return cls(kind=ProblemKind.CUSTOM, polytope=polytope, name=name)


def polytope_to_dict(lp: LPProblem) -> Dict[str, Any]:
    def _bound(values):
        return [None if not np.isfinite(v) else float(v) for v in values]

    return {
        "matrix": [[float(a) for a in row] for row in lp.matrix],
        "senses": [s.value for s in lp.senses],
        "rhs": [float(b) for b in lp.rhs],
        "lower": _bound(lp.var_lower),
        "upper": _bound(lp.var_upper),
    }


def polytope_from_dict(data: Dict[str, Any]) -> LPProblem:
    lower = np.array([-np.inf if v is None else v for v in data["lower"]], dtype=float)
    upper = np.array([np.inf if v is None else v for v in data["upper"]], dtype=float)
    n = len(lower)
    return LPProblem(
        objective=np.zeros(n),
        matrix=np.array(data["matrix"], dtype=float).reshape(len(data["rhs"]), n),
        senses=tuple(Sense(s) for s in data["senses"]),
        rhs=np.array(data["rhs"], dtype=float),
        var_lower=lower,
        var_upper=upper,
    )


def grid_shortest_path(rows: int, cols: int) -> NominalProblem:
    """Unit-flow polytope of a rows x cols grid with east and south arcs.

    Node (r, c) has index r * cols + c. East arcs come first (row-major),
    then south arcs. One unit of flow leaves node 0 and reaches the last node.
    """
    if rows < 2 or cols < 2:
        raise InvalidDimension(f"Grid needs at least 2 rows and 2 cols, got {rows}x{cols}")

    n_nodes = rows * cols
    edges = []
    for r in range(rows):
        for c in range(cols - 1):
            edges.append((r * cols + c, r * cols + c + 1))
    for r in range(rows - 1):
        for c in range(cols):
            edges.append((r * cols + c, (r + 1) * cols + c))

    matrix = np.zeros((n_nodes, len(edges)))
    for a, (tail, head) in enumerate(edges):
        matrix[tail, a] = 1.0
        matrix[head, a] = -1.0
    supply = np.zeros(n_nodes)
    supply[0] = 1.0
    supply[-1] = -1.0

    polytope = LPProblem(
        objective=np.zeros(len(edges)),
        matrix=matrix,
        senses=(Sense.EQ,) * n_nodes,
        rhs=supply,
        var_lower=np.zeros(len(edges)),
    )
    logger.debug("grid_built", rows=rows, cols=cols, nodes=n_nodes, arcs=len(edges))
    return NominalProblem(
        kind=ProblemKind.SHORTEST_PATH,
        polytope=polytope,
        edges=tuple(edges),
        nodes=tuple(range(n_nodes)),
        name=f"sp-{rows}x{cols}",
        params={"rows": rows, "cols": cols},
    )


def bipartite_matching(n_left: int, n_right: int, n_edges: int, seed: int = 0) -> NominalProblem:
    """Matching polytope of a random bipartite graph.

    Left nodes are 0..n_left-1, right nodes follow. Edges are drawn uniformly
    without replacement from the complete bipartite graph and kept in
    row-major (left, right) order.
    """
    if n_left < 1 or n_right < 1:
        raise InvalidDimension(f"Both sides need at least one node, got {n_left} and {n_right}")
    if n_edges < 1 or n_edges > n_left * n_right:
        raise InvalidDimension(
            f"n_edges must lie in [1, {n_left * n_right}] for a {n_left}x{n_right} graph, got {n_edges}"
        )

    rng = np.random.default_rng(seed)
    chosen = np.sort(rng.choice(n_left * n_right, size=n_edges, replace=False))
    edges = [(int(k // n_right), n_left + int(k % n_right)) for k in chosen]

    n_nodes = n_left + n_right
    matrix = np.zeros((n_nodes, n_edges))
    for e, (u, w) in enumerate(edges):
        matrix[u, e] = 1.0
        matrix[w, e] = 1.0

    polytope = LPProblem(
        objective=np.zeros(n_edges),
        matrix=matrix,
        senses=(Sense.LE,) * n_nodes,
        rhs=np.ones(n_nodes),
        var_lower=np.zeros(n_edges),
    )
    return NominalProblem(
        kind=ProblemKind.MATCHING,
        polytope=polytope,
        edges=tuple(edges),
        nodes=tuple(range(n_nodes)),
        negated_weights=True,
        name=f"bm-{n_left}x{n_right}-{n_edges}",
        params={"n_left": n_left, "n_right": n_right, "n_edges": n_edges, "seed": seed},
    )
