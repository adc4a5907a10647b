"""Brute-force references for small polytopes: explicit vertex lists instead of LPs."""

import itertools

import numpy as np

from dflregret.lp import LPProblem, Sense, canonicalize


def enumerate_vertices(lp: LPProblem, tol: float = 1e-8) -> np.ndarray:
    """All vertices of {v : lp rows, lp bounds}, from every non-singular choice of n tight rows."""
    form = canonicalize(lp)
    A, b = form.matrix, form.rhs
    n = lp.n_vars
    found = []
    for rows in itertools.combinations(range(A.shape[0]), n):
        sub = A[list(rows)]
        if abs(np.linalg.det(sub)) < 1e-10:
            continue
        v = np.linalg.solve(sub, b[list(rows)])
        if np.all(A @ v >= b - tol) and not any(np.allclose(v, w, atol=tol) for w in found):
            found.append(v)
    return np.array(found).reshape(len(found), n)


def brute_force_regret(vertices: np.ndarray, c: np.ndarray, chat: np.ndarray, pessimistic: bool = True) -> float:
    """Regret over an explicit vertex list; ties in chat are broken against (or for) the decision maker."""
    predicted = vertices @ chat
    best = predicted.min()
    face = vertices[predicted <= best + 1e-9 * max(1.0, abs(best))]
    true_costs = face @ c
    zstar = (vertices @ c).min()
    chosen = true_costs.max() if pessimistic else true_costs.min()
    return float(chosen - zstar)


def random_polytope(rng: np.random.Generator, n: int, cuts: int) -> LPProblem:
    """[0, 1]^n intersected with ``cuts`` random half-spaces that keep the centre feasible."""
    matrix = rng.standard_normal((cuts, n))
    centre = np.full(n, 0.5)
    rhs = matrix @ centre + rng.uniform(0.1, 0.5, size=cuts)
    return LPProblem(
        objective=np.zeros(n),
        matrix=matrix,
        senses=(Sense.LE,) * cuts,
        rhs=rhs,
        var_lower=np.zeros(n),
        var_upper=np.ones(n),
    )
