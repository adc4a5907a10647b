"""
Tests for the nominal problems: grid shortest path, bipartite matching and custom polytopes.

Run with: python3 -m pytest tests/test_polytopes.py -v
"""

import numpy as np
import pytest

from dflregret.errors import InvalidDimension, InvalidParam
from dflregret.lp import LPProblem, LPStatus, solve
from dflregret.problems import (
    NominalProblem,
    ProblemKind,
    bipartite_matching,
    grid_shortest_path,
    triangle,
    unit_box,
)
from dflregret.regret import true_optimum


def test_grid_sizes():
    """A 5x5 grid has 25 nodes and 40 arcs (20 east, 20 south)."""
    problem = grid_shortest_path(5, 5)
    assert problem.kind is ProblemKind.SHORTEST_PATH
    assert problem.n == 40, f"Expected 40 arcs, got {problem.n}"
    assert problem.polytope.n_rows == 25
    assert len(problem.nodes) == 25
    # 25 flow rows kept once plus 40 non-negativity rows
    assert problem.compact_form.n_rows == 65


def test_grid_unit_costs_give_manhattan_path():
    """With unit costs the cheapest corner-to-corner path uses 8 arcs."""
    problem = grid_shortest_path(5, 5)
    solution = solve(problem.polytope.with_objective(np.ones(problem.n)))
    assert solution.status is LPStatus.OPTIMAL
    assert solution.objective == pytest.approx(8.0, abs=1e-9)
    assert np.all(np.isclose(solution.primal, 0.0) | np.isclose(solution.primal, 1.0))


def test_grid_vertices_are_integral_unit_flows():
    """100 random cost vectors on the 5x5 grid: 0/1 solutions conserving one unit of flow."""
    problem = grid_shortest_path(5, 5)
    lp = problem.polytope
    rng = np.random.default_rng(13)
    for trial in range(100):
        solution = solve(lp.with_objective(rng.uniform(0.1, 5.0, size=problem.n)))
        v = solution.primal
        assert solution.status is LPStatus.OPTIMAL, f"trial {trial}: {solution.status}"
        assert np.all(np.isclose(v, 0.0, atol=1e-9) | np.isclose(v, 1.0, atol=1e-9)), \
            f"trial {trial}: fractional flow {v}"
        assert np.allclose(lp.matrix @ v, lp.rhs, atol=1e-9), f"trial {trial}: flow not conserved"
        assert int(round(v.sum())) == 8, f"trial {trial}: a monotone path uses 8 arcs"


def test_matching_vertices_are_integral():
    """100 random weight vectors on a 13x12 graph: 0/1 matchings with degree at most one."""
    problem = bipartite_matching(13, 12, 40, seed=3)
    lp = problem.polytope
    rng = np.random.default_rng(14)
    for trial in range(100):
        solution = solve(lp.with_objective(-rng.uniform(0.1, 5.0, size=problem.n)))
        v = solution.primal
        assert solution.status is LPStatus.OPTIMAL, f"trial {trial}: {solution.status}"
        assert np.all(np.isclose(v, 0.0, atol=1e-9) | np.isclose(v, 1.0, atol=1e-9)), \
            f"trial {trial}: fractional matching {v}"
        assert lp.is_feasible_point(v, tol=1e-9), f"trial {trial}: a node is matched twice"


def test_grid_edge_order():
    """East arcs come first in row-major order, then south arcs."""
    problem = grid_shortest_path(2, 3)
    assert problem.edges[:4] == ((0, 1), (1, 2), (3, 4), (4, 5))
    assert problem.edges[4:] == ((0, 3), (1, 4), (2, 5))


def test_grid_too_small():
    with pytest.raises(InvalidDimension):
        grid_shortest_path(1, 5)


def test_matching_sizes_and_determinism():
    """13x12 graph with 40 sampled edges; the same seed draws the same edges."""
    first = bipartite_matching(13, 12, 40, seed=3)
    second = bipartite_matching(13, 12, 40, seed=3)
    other = bipartite_matching(13, 12, 40, seed=4)
    assert first.n == 40
    assert first.polytope.n_rows == 25
    assert first.negated_weights
    assert first.edges == second.edges
    assert first.edges != other.edges
    assert all(u < 13 <= w for u, w in first.edges), "Edges must join left to right nodes"


def test_complete_two_by_two_matching():
    """All four edges present; weights 1, 1, 1, 2 pick the two disjoint edges worth 3."""
    problem = bipartite_matching(2, 2, 4, seed=0)
    assert problem.edges == ((0, 2), (0, 3), (1, 2), (1, 3))
    zstar, vstar = true_optimum(problem, np.array([-1.0, -1.0, -1.0, -2.0]))
    assert zstar == pytest.approx(-3.0, abs=1e-9)
    assert np.allclose(vstar, [1.0, 0.0, 0.0, 1.0], atol=1e-9)


def test_matching_invalid_edges():
    with pytest.raises(InvalidDimension):
        bipartite_matching(2, 2, 5)
    with pytest.raises(InvalidDimension):
        bipartite_matching(0, 2, 1)


def test_demo_polytopes():
    assert triangle().n == 2
    assert unit_box(3).n == 3
    with pytest.raises(InvalidDimension):
        unit_box(0)


def test_custom_polytope_validation():
    """Unbounded regions are refused unless validation is skipped."""
    halfplane = LPProblem.from_rows([0.0, 0.0], [([1.0, 1.0], "GE", 1.0)], var_lower=[0.0, 0.0])
    with pytest.raises(InvalidParam):
        NominalProblem.custom(halfplane)
    problem = NominalProblem.custom(halfplane, validate=False)
    assert problem.kind is ProblemKind.CUSTOM


def test_descriptor_round_trip():
    """describe() carries enough to rebuild every problem kind."""
    for problem in (grid_shortest_path(3, 4), bipartite_matching(4, 3, 6, seed=1), triangle()):
        rebuilt = NominalProblem.from_descriptor(problem.describe())
        assert rebuilt.polytope == problem.polytope, f"{problem.name} changed"
        assert rebuilt.edges == problem.edges
