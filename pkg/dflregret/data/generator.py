"""Synthetic cost generation and the small worked-example datasets."""

from typing import Optional

import numpy as np
import structlog

from dflregret.data.dataset import Dataset, GenParams, train_size
from dflregret.errors import InvalidDimension, InvalidParam
from dflregret.problems import NominalProblem, triangle, unit_box

logger = structlog.get_logger()

OMEGA_LAWS = ("bernoulli", "normal")


def cost_formula(x: np.ndarray, omega: np.ndarray, deg: int) -> np.ndarray:
    """Noise-free costs: ((omega_a . x / sqrt(K) + 3)^deg / 3.5^deg + 1) for every arc a.

    Args:
        x: Features, shape (N, K)
        omega: True parameters, shape (n, K)
        deg: Polynomial degree (model misspecification)

    Returns:
        Cost matrix of shape (N, n)
    """
    x = np.atleast_2d(np.asarray(x, dtype=float))
    omega = np.atleast_2d(np.asarray(omega, dtype=float))
    k = x.shape[1]
    base = x @ omega.T / np.sqrt(k) + 3.0
    return base ** deg / 3.5 ** deg + 1.0


def generate(
    problem: NominalProblem,
    n_samples: int,
    n_features: int,
    deg: int,
    noise: float,
    seed: int,
    omega_law: str = "bernoulli",
    true_omega: Optional[np.ndarray] = None,
) -> Dataset:
    """Draw a synthetic dataset for ``problem``.

    Features, true parameters and noise come from three independent streams
    spawned from ``seed``. The first round(0.7 N) samples form the train split.
    Matching weights are stored negated.
    """
    if deg < 1:
        raise InvalidParam(f"deg must be >= 1, got {deg}")
    if not 0.0 <= noise < 1.0:
        raise InvalidParam(f"noise half-width must lie in [0, 1), got {noise}")
    if n_features < 1 or n_samples < 1:
        raise InvalidParam(f"need N >= 1 and K >= 1, got N={n_samples}, K={n_features}")
    if omega_law not in OMEGA_LAWS:
        raise InvalidParam(f"omega_law must be one of {OMEGA_LAWS}, got {omega_law!r}")

    feature_seq, omega_seq, noise_seq = np.random.SeedSequence(seed).spawn(3)
    x = np.random.default_rng(feature_seq).standard_normal((n_samples, n_features))

    n = problem.n
    if true_omega is None:
        omega_rng = np.random.default_rng(omega_seq)
        if omega_law == "bernoulli":
            true_omega = omega_rng.binomial(1, 0.5, size=(n, n_features)).astype(float)
        else:
            true_omega = omega_rng.standard_normal((n, n_features))
    true_omega = np.asarray(true_omega, dtype=float)
    if true_omega.shape != (n, n_features):
        raise InvalidDimension(f"true_omega must have shape {(n, n_features)}, got {true_omega.shape}")

    epsilon = np.random.default_rng(noise_seq).uniform(1.0 - noise, 1.0 + noise, size=(n_samples, n))
    c = cost_formula(x, true_omega, deg) * epsilon
    if problem.negated_weights:
        c = -c

    n_train = train_size(n_samples)
    dataset = Dataset(
        problem=problem,
        x=x,
        c=c,
        train=tuple(range(n_train)),
        test=tuple(range(n_train, n_samples)),
        gen_params=GenParams(
            n_samples=n_samples,
            n_features=n_features,
            deg=deg,
            noise=float(noise),
            seed=seed,
            true_omega=true_omega,
            omega_law=omega_law,
        ),
    )
    logger.info(
        "dataset_generated",
        problem=problem.name,
        n_samples=n_samples,
        n_features=n_features,
        deg=deg,
        noise=noise,
        seed=seed,
    )
    return dataset


def _all_train(problem: NominalProblem, x, c) -> Dataset:
    x = np.asarray(x, dtype=float)
    c = np.asarray(c, dtype=float)
    return Dataset(
        problem=problem,
        x=x,
        c=c,
        train=tuple(range(len(x))),
        test=(),
        gen_params=GenParams(n_samples=len(x), n_features=x.shape[1]),
    )


def triangle_demo_dataset() -> Dataset:
    """Three observations on the triangle; costs are to be minimized."""
    return _all_train(
        triangle(),
        x=[[0.0], [1.0], [2.0]],
        c=[[-3.0, -2.0], [-2.0, -5.0], [-2.0, 0.0]],
    )


def square_demo_dataset() -> Dataset:
    """Two observations on [0,1]^2 that admit a zero-regret model but no exact fit."""
    return _all_train(
        unit_box(2),
        x=[[1.0], [-1.0]],
        c=[[-1.0, -2.0], [1.0, 1.0]],
    )


def conflicting_pair_dataset() -> Dataset:
    """Same feature, opposite cost signs on [0,1]: zero regret is impossible."""
    return _all_train(
        unit_box(1),
        x=[[1.0], [1.0]],
        c=[[1.0], [-1.0]],
    )
