"""
Tests for linear models and the exact pessimistic / optimistic regret oracle.

Run with: python3 -m pytest tests/test_regret.py -v
"""

import numpy as np
import pytest

from dflregret.data import Dataset, GenParams, Split
from dflregret.errors import DegenerateNormalization, InvalidDimension, SchemaError
from dflregret.problems import NominalProblem, unit_box
from dflregret.regret import (
    LinearModel,
    RegretMode,
    RegretOracle,
    normalize,
    optimistic_regret,
    pessimistic_regret,
    sample_regret,
    true_optimum,
)
from dflregret.training import train_least_squares
from tests.helpers import brute_force_regret, enumerate_vertices, random_polytope

# Intercept column first, then the single feature
GOOD_OMEGA = [[-1.0, -1.0], [-4.0, 1.0]]
ROUNDED_LSQ_OMEGA = [[-2.83, 0.50], [-3.33, 0.99]]


# =============================================================================
# Worked three-sample example on the triangle
# =============================================================================

def test_zero_model_pessimistic_regret(triangle_data):
    """Predicting zero makes every vertex optimal; the worst one costs 10/3 on average."""
    model = LinearModel.zeros(2, 1, bias=True)
    report = pessimistic_regret(triangle_data.problem, triangle_data, Split.TRAIN, model)
    assert report.mean_regret == pytest.approx(10.0 / 3.0, abs=1e-6), f"Got {report.mean_regret}"
    assert np.allclose(report.per_sample_regret, [3.0, 5.0, 2.0], atol=1e-6)


def test_zero_model_optimistic_regret(triangle_data):
    model = LinearModel.zeros(2, 1, bias=True)
    report = optimistic_regret(triangle_data.problem, triangle_data, Split.TRAIN, model)
    assert report.mean_regret == pytest.approx(0.0, abs=1e-6)


def test_good_model_regret(triangle_data):
    model = LinearModel(omega=GOOD_OMEGA, bias=True)
    oracle = RegretOracle(triangle_data.problem, triangle_data)
    assert oracle.value(model) == pytest.approx(1.0 / 3.0, abs=1e-6)


def test_rounded_least_squares_regret(triangle_data):
    """The two-decimal least-squares fit misroutes only the first sample."""
    model = LinearModel(omega=ROUNDED_LSQ_OMEGA, bias=True)
    oracle = RegretOracle(triangle_data.problem, triangle_data)
    assert oracle.value(model) == pytest.approx(1.0 / 3.0, abs=1e-6)


def test_exact_least_squares_regret(triangle_data):
    """The exact fit ties both arcs at x = 1; the pessimistic tie-break gives 4/3."""
    model = train_least_squares(triangle_data.problem, triangle_data, bias=True)
    assert np.allclose(model.omega, [[-17.0 / 6.0, 0.5], [-10.0 / 3.0, 1.0]], atol=1e-9), f"Got {model.omega}"
    oracle = RegretOracle(triangle_data.problem, triangle_data)
    assert oracle.value(model) == pytest.approx(4.0 / 3.0, abs=1e-6)


def test_true_optimum_of_demo_samples(triangle_data):
    oracle = RegretOracle(triangle_data.problem, triangle_data)
    assert np.allclose(oracle.zstar, [-3.0, -5.0, -2.0], atol=1e-9)
    assert np.allclose(oracle.vstar, [[1.0, 0.0], [0.0, 1.0], [1.0, 0.0]], atol=1e-9)


# =============================================================================
# Oracle properties
# =============================================================================

def test_pessimistic_dominates_optimistic(grid3_data):
    rng = np.random.default_rng(0)
    oracle = RegretOracle(grid3_data.problem, grid3_data)
    for _ in range(5):
        model = LinearModel(omega=rng.standard_normal((grid3_data.problem.n, 4)), bias=True)
        pess = oracle.report(model, RegretMode.PESSIMISTIC)
        opt = oracle.report(model, RegretMode.OPTIMISTIC)
        assert np.all(pess.per_sample_regret >= opt.per_sample_regret - 1e-9)
        assert np.all(opt.per_sample_regret >= -1e-9)


def test_scale_invariance(grid3_data):
    """Lambda(alpha * omega) == Lambda(omega) for every alpha > 0."""
    rng = np.random.default_rng(1)
    oracle = RegretOracle(grid3_data.problem, grid3_data)
    model = LinearModel(omega=rng.standard_normal((grid3_data.problem.n, 4)), bias=True)
    base = oracle.value(model)
    for alpha in (1e-4, 0.5, 3.0, 1e4):
        assert oracle.value(model.scaled(alpha)) == pytest.approx(base, abs=1e-9), f"alpha={alpha}"


def test_regret_is_piecewise_constant(triangle_data):
    """For c = (-3, -2) regret is 1 up to and on the tie chat_1 = chat_2, then drops to 0."""
    problem = triangle_data.problem
    c = np.array([-3.0, -2.0])
    for t in (-0.5, -0.1, -1e-4, 0.0, 1e-4, 0.1, 0.5):
        value = sample_regret(problem, c, np.array([-1.0, -1.0 + t]), zstar=-3.0)
        expected = 0.0 if t > 0.0 else 1.0
        assert value == pytest.approx(expected, abs=1e-9), f"t={t}: regret {value}"

    # away from the tie small nudges never move the value, so its gradient is zero
    rng = np.random.default_rng(3)
    for chat in ([-1.0, -1.5], [-1.0, -0.5]):
        base = sample_regret(problem, c, np.array(chat), zstar=-3.0)
        for _ in range(20):
            nudged = np.array(chat) + 1e-3 * rng.standard_normal(2)
            assert sample_regret(problem, c, nudged, zstar=-3.0) == pytest.approx(base, abs=1e-9), \
                f"regret moved at {nudged}"


def test_oracle_matches_brute_force_on_random_polytopes():
    """Face LP regret equals enumeration over explicit vertices."""
    rng = np.random.default_rng(2024)
    checked = 0
    while checked < 100:
        n = int(rng.integers(2, 4))
        lp = random_polytope(rng, n, cuts=int(rng.integers(1, 3)))
        vertices = enumerate_vertices(lp)
        if len(vertices) > 10:
            continue
        problem = NominalProblem.custom(lp, validate=False)
        c = rng.standard_normal(n)
        chat = rng.standard_normal(n) if checked % 10 else np.zeros(n)
        zstar, _ = true_optimum(problem, c)
        for mode, pessimistic in ((RegretMode.PESSIMISTIC, True), (RegretMode.OPTIMISTIC, False)):
            ours = sample_regret(problem, c, chat, zstar, mode)
            reference = brute_force_regret(vertices, c, chat, pessimistic=pessimistic)
            assert ours == pytest.approx(reference, abs=1e-7), \
                f"case {checked} ({mode.value}): {ours} vs {reference}"
        checked += 1


def test_oracle_counts_evaluations(triangle_data):
    oracle = RegretOracle(triangle_data.problem, triangle_data)
    model = LinearModel.zeros(2, 1, bias=True)
    oracle.value(model)
    oracle.report(model, RegretMode.OPTIMISTIC)
    assert oracle.evaluations == 2


def test_threaded_oracle_agrees(grid3_data):
    model = LinearModel(omega=np.random.default_rng(3).standard_normal((grid3_data.problem.n, 4)), bias=True)
    serial = RegretOracle(grid3_data.problem, grid3_data, workers=1).report(model)
    threaded = RegretOracle(grid3_data.problem, grid3_data, workers=4).report(model)
    assert np.allclose(serial.per_sample_regret, threaded.per_sample_regret, atol=1e-12)


def test_dimension_mismatch(triangle_data):
    oracle = RegretOracle(triangle_data.problem, triangle_data)
    with pytest.raises(InvalidDimension):
        oracle.value(LinearModel(omega=np.zeros((3, 2)), bias=True))
    with pytest.raises(InvalidDimension):
        oracle.value(LinearModel.zeros(2, 3, bias=True))


# =============================================================================
# Normalization
# =============================================================================

def test_normalized_regret(triangle_data):
    """Sum of regret over |sum of z*|: 10 / 10 for the zero model."""
    report = RegretOracle(triangle_data.problem, triangle_data).report(LinearModel.zeros(2, 1, bias=True))
    assert normalize(report) == pytest.approx(1.0, abs=1e-6)
    assert report.normalized_regret == pytest.approx(1.0, abs=1e-6)


def test_degenerate_normalization():
    problem = unit_box(1)
    dataset = Dataset(
        problem=problem,
        x=[[1.0]],
        c=[[1.0]],
        train=(0,),
        test=(),
        gen_params=GenParams(n_samples=1, n_features=1),
    )
    report = RegretOracle(problem, dataset).report(LinearModel.zeros(1, 1))
    with pytest.raises(DegenerateNormalization):
        normalize(report)
    assert report.normalized_regret is None
    assert report.to_dict()["normalized_regret"] is None


# =============================================================================
# Model files
# =============================================================================

def test_model_save_load(tmp_path):
    model = LinearModel(omega=GOOD_OMEGA, bias=True)
    path = model.save(tmp_path / "model.json")
    assert LinearModel.load(path) == model


def test_model_load_rejects_bad_files(tmp_path):
    path = tmp_path / "model.json"
    path.write_text('{"omega": [1.0, 2.0, 3.0], "n": 2, "k": 2, "bias": false}', encoding="utf-8")
    with pytest.raises(SchemaError):
        LinearModel.load(path)
    path.write_text("[]", encoding="utf-8")
    with pytest.raises(SchemaError):
        LinearModel.load(path)
