from .demos import triangle, unit_box
from .polytopes import (
    NominalProblem,
    ProblemKind,
    bipartite_matching,
    grid_shortest_path,
    polytope_from_dict,
    polytope_to_dict,
)

__all__ = [
    "triangle",
    "unit_box",
    "NominalProblem",
    "ProblemKind",
    "bipartite_matching",
    "grid_shortest_path",
    "polytope_from_dict",
    "polytope_to_dict",
]
