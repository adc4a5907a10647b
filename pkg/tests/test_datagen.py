"""
Tests for synthetic data generation, the train/test split and dataset files.

Run with: python3 -m pytest tests/test_datagen.py -v
"""

import json

import numpy as np
import pytest

from dflregret.data import Split, cost_formula, generate, load, save, train_size
from dflregret.errors import DatasetIoError, InvalidParam, SchemaError
from dflregret.problems import bipartite_matching, grid_shortest_path


def test_train_size_rounds_half_up():
    assert train_size(100) == 70
    assert train_size(50) == 35
    assert train_size(5) == 4, "0.7 * 5 = 3.5 rounds up"
    assert train_size(1) == 1


def test_generate_shapes_and_split(grid3):
    dataset = generate(grid3, n_samples=10, n_features=4, deg=2, noise=0.5, seed=1)
    assert dataset.x.shape == (10, 4)
    assert dataset.c.shape == (10, grid3.n)
    assert dataset.train == tuple(range(7))
    assert dataset.test == (7, 8, 9)
    assert dataset.gen_params.true_omega.shape == (grid3.n, 4)
    assert set(np.unique(dataset.gen_params.true_omega)) <= {0.0, 1.0}


def test_generate_is_reproducible(grid3):
    first = generate(grid3, n_samples=8, n_features=3, deg=4, noise=0.3, seed=42)
    second = generate(grid3, n_samples=8, n_features=3, deg=4, noise=0.3, seed=42)
    other = generate(grid3, n_samples=8, n_features=3, deg=4, noise=0.3, seed=43)
    assert first == second
    assert not np.array_equal(first.c, other.c)


def test_noise_free_costs_follow_formula(grid3):
    dataset = generate(grid3, n_samples=6, n_features=2, deg=3, noise=0.0, seed=5)
    expected = cost_formula(dataset.x, dataset.gen_params.true_omega, 3)
    assert np.allclose(dataset.c, expected, atol=1e-12)


def test_cost_formula_constant_at_zero_features():
    """x = 0 gives (3/3.5)^deg + 1 on every arc."""
    costs = cost_formula(np.zeros((1, 2)), np.ones((3, 2)), deg=2)
    assert np.allclose(costs, (3.0 / 3.5) ** 2 + 1.0)


def test_cost_formula_single_feature():
    """K = 1, omega = 1, x = 1, deg = 2: 16 / 12.25 + 1."""
    costs = cost_formula(np.ones((1, 1)), np.ones((1, 1)), deg=2)
    assert costs[0, 0] == pytest.approx(2.306122, abs=1e-6)


def test_generated_moments(grid3):
    """Standard normal features, fair Bernoulli omega and multiplicative U[1-e, 1+e] noise."""
    noise = 0.5
    dataset = generate(grid3, n_samples=2000, n_features=3, deg=4, noise=noise, seed=17)
    x = dataset.x
    assert abs(float(x.mean())) < 0.05, f"feature mean {x.mean()}"
    assert abs(float(x.std()) - 1.0) < 0.05, f"feature std {x.std()}"

    ones = float(dataset.gen_params.true_omega.mean())
    assert 0.2 <= ones <= 0.8, f"Bernoulli(0.5) share of ones is {ones}"

    ratio = dataset.c / cost_formula(x, dataset.gen_params.true_omega, 4)
    assert ratio.min() >= 1.0 - noise and ratio.max() <= 1.0 + noise
    assert float(ratio.mean()) == pytest.approx(1.0, abs=0.01)
    assert float(ratio.var()) == pytest.approx(noise ** 2 / 3.0, abs=0.005)


def test_even_degree_costs_are_positive(grid3):
    dataset = generate(grid3, n_samples=30, n_features=5, deg=2, noise=0.5, seed=9)
    assert np.all(dataset.c > 0.0)


def test_matching_weights_are_negated():
    problem = bipartite_matching(4, 4, 8, seed=0)
    dataset = generate(problem, n_samples=5, n_features=2, deg=2, noise=0.1, seed=0)
    assert np.all(dataset.c < 0.0), "Matching stores -w so the problem stays a minimization"


def test_normal_omega_law(grid3):
    dataset = generate(grid3, n_samples=4, n_features=2, deg=2, noise=0.0, seed=0, omega_law="normal")
    assert not set(np.unique(dataset.gen_params.true_omega)) <= {0.0, 1.0}


@pytest.mark.parametrize(
    "kwargs",
    [
        {"deg": 0},
        {"noise": 1.0},
        {"noise": -0.1},
        {"omega_law": "uniform"},
        {"n_features": 0},
    ],
)
def test_invalid_parameters(grid3, kwargs):
    params = {"n_samples": 5, "n_features": 2, "deg": 2, "noise": 0.5, "seed": 0}
    params.update(kwargs)
    with pytest.raises(InvalidParam):
        generate(grid3, **params)


def test_subset_makes_everything_train(grid3_data):
    test_only = grid3_data.subset(Split.TEST)
    assert test_only.n_samples == len(grid3_data.test)
    assert test_only.train == tuple(range(test_only.n_samples))
    assert np.array_equal(test_only.c, grid3_data.costs(Split.TEST))


def test_save_load_round_trip(tmp_path, grid3_data):
    path = save(grid3_data, tmp_path / "data" / "grid.json")
    assert path.exists()
    assert load(path) == grid3_data


def test_save_load_matching_and_demo(tmp_path, triangle_data):
    matching = generate(bipartite_matching(3, 3, 5, seed=2), n_samples=4, n_features=2, deg=2, noise=0.2, seed=1)
    assert load(save(matching, tmp_path / "bm.json")) == matching
    assert load(save(triangle_data, tmp_path / "triangle.json")) == triangle_data


def test_load_missing_file(tmp_path):
    with pytest.raises(DatasetIoError):
        load(tmp_path / "nope.json")


def test_load_corrupt_file(tmp_path):
    path = tmp_path / "broken.json"
    path.write_text("{not json", encoding="utf-8")
    with pytest.raises(SchemaError):
        load(path)


def test_load_wrong_version(tmp_path, grid3_data):
    path = save(grid3_data, tmp_path / "grid.json")
    doc = json.loads(path.read_text(encoding="utf-8"))
    doc["version"] = 99
    path.write_text(json.dumps(doc), encoding="utf-8")
    with pytest.raises(SchemaError):
        load(path)


def test_load_inconsistent_costs(tmp_path):
    problem = grid_shortest_path(2, 2)
    dataset = generate(problem, n_samples=3, n_features=2, deg=2, noise=0.0, seed=0)
    path = save(dataset, tmp_path / "grid.json")
    doc = json.loads(path.read_text(encoding="utf-8"))
    doc["samples"][0]["c"] = doc["samples"][0]["c"][:-1]
    path.write_text(json.dumps(doc), encoding="utf-8")
    with pytest.raises(SchemaError):
        load(path)
