"""
Tests for the trainers: SPO+ LP, local search, alternating descent and the staged pipeline.

Run with: python3 -m pytest tests/test_trainers.py -v
Slow sweep: python3 -m pytest tests/test_trainers.py -v -m slow
"""

import importlib
import time

import numpy as np
import pytest

from dflregret.config import set_config
from dflregret.data import Dataset, GenParams, Split, generate
from dflregret.errors import InfeasibleProblem, InvalidParam, TimeBudgetExceeded
from dflregret.lp import LPProblem
from dflregret.problems import NominalProblem, ProblemKind, bipartite_matching, grid_shortest_path, triangle
from dflregret.regret import LinearModel, RegretOracle, dual_structure, sample_regret, true_optimum
from dflregret.training import (
    FixedDuals,
    Stage,
    TerminationReason,
    TrainConfig,
    alternating,
    local_search,
    parse_method,
    pipeline,
    solve_lp1_fixed_omega,
    solve_lp2_fixed_duals,
    solve_spo_plus_lp,
    spo_plus_loss,
    spo_plus_losses,
    stage_budgets,
    train_least_squares,
)


def _small_cfg(**overrides) -> TrainConfig:
    values = {"ls_iters": 3, "ls_samples": 4, "alt_iters": 5, "ls_epsilon": 0.1, "seed": 0}
    values.update(overrides)
    return TrainConfig.create(**values)


# =============================================================================
# SPO+
# =============================================================================

def test_spo_plus_model_on_demo(triangle_data):
    """SPO+ gets samples 1 and 3 right and misroutes sample 2: regret 1."""
    model, mean_loss = solve_spo_plus_lp(triangle_data.problem, triangle_data, bias=True)
    oracle = RegretOracle(triangle_data.problem, triangle_data)
    assert oracle.value(model) == pytest.approx(1.0, abs=1e-6), f"Got {oracle.value(model)}"
    assert mean_loss == pytest.approx(1.5, abs=1e-6), f"Got mean SPO+ loss {mean_loss}"


def test_spo_plus_lp_value_matches_losses(grid3_data):
    """The LP optimum equals the mean of the per-sample losses of the returned model."""
    problem = grid3_data.problem
    model, mean_loss = solve_spo_plus_lp(problem, grid3_data, bias=True)
    losses = spo_plus_losses(problem, grid3_data, model)
    assert float(np.mean(losses)) == pytest.approx(mean_loss, abs=1e-6)
    assert np.all(losses >= -1e-9)


def test_spo_plus_dominates_regret(triangle_data, grid3_data):
    """SPO+ is an upper bound on the pessimistic regret of every prediction."""
    rng = np.random.default_rng(5)
    for dataset in (triangle_data, grid3_data):
        problem = dataset.problem
        for trial in range(100):
            i = int(rng.integers(dataset.n_samples))
            c = dataset.c[i]
            chat = rng.standard_normal(problem.n) * rng.choice([0.1, 1.0, 10.0])
            zstar, vstar = true_optimum(problem, c)
            loss = spo_plus_loss(problem, c, chat, zstar, vstar)
            regret = sample_regret(problem, c, chat, zstar)
            assert loss >= regret - 1e-7, f"{problem.name} trial {trial}: loss {loss} < regret {regret}"


def test_spo_plus_loss_of_truth_is_zero(grid3_data):
    """Predicting the true cost costs nothing."""
    problem = grid3_data.problem
    for c in grid3_data.c[:5]:
        assert spo_plus_loss(problem, c, c) == pytest.approx(0.0, abs=1e-7)


def test_least_squares_shapes(grid3_data):
    model = train_least_squares(grid3_data.problem, grid3_data, bias=False)
    assert model.omega.shape == (grid3_data.problem.n, 3)
    assert not model.bias


def test_spo_plus_with_duplicated_samples(grid3_data):
    """Listing every sample twice leaves the mean loss and the optimum unchanged."""
    problem = grid3_data.problem
    original = grid3_data.subset(Split.TRAIN)
    doubled = Dataset(
        problem=problem,
        x=np.vstack([original.x, original.x]),
        c=np.vstack([original.c, original.c]),
        train=tuple(range(2 * original.n_samples)),
        test=(),
        gen_params=GenParams(n_samples=2 * original.n_samples, n_features=original.n_features),
    )
    _, base_loss = solve_spo_plus_lp(problem, original)
    doubled_model, doubled_loss = solve_spo_plus_lp(problem, doubled)
    assert doubled_loss == pytest.approx(base_loss, abs=1e-6)
    on_original = float(np.mean(spo_plus_losses(problem, original, doubled_model)))
    assert on_original == pytest.approx(base_loss, abs=1e-6), \
        f"Model trained on doubled data scores {on_original}, optimum is {base_loss}"


def test_spo_plus_matches_grid_search():
    """Two samples with x = 1 and no intercept: no grid point beats the LP optimum of 2."""
    problem = triangle()
    dataset = Dataset(
        problem=problem,
        x=[[1.0], [1.0]],
        c=[[-3.0, -2.0], [-2.0, -5.0]],
        train=(0, 1),
        test=(),
        gen_params=GenParams(n_samples=2, n_features=1),
    )
    _, mean_loss = solve_spo_plus_lp(problem, dataset, bias=False)
    assert mean_loss == pytest.approx(2.0, abs=1e-6)

    oracle = RegretOracle(problem, dataset)
    steps = np.arange(-6.0, 6.0 + 1e-9, 0.25)
    best = min(
        float(np.mean(spo_plus_losses(problem, dataset, LinearModel(omega=[[a], [b]], bias=False), oracle=oracle)))
        for a in steps
        for b in steps
    )
    assert best >= mean_loss - 1e-7, f"grid point reached {best} below the LP value {mean_loss}"
    assert best == pytest.approx(2.0, abs=1e-7)


def test_spo_plus_past_deadline(grid3_data):
    with pytest.raises(TimeBudgetExceeded):
        solve_spo_plus_lp(grid3_data.problem, grid3_data, deadline=time.perf_counter() - 1.0)


# =============================================================================
# Local search
# =============================================================================

def test_local_search_is_monotone(grid3_data):
    problem = grid3_data.problem
    start, _ = solve_spo_plus_lp(problem, grid3_data)
    model, trace = local_search(problem, grid3_data, start, _small_cfg(ls_iters=5))
    assert trace.iterations == 5
    assert trace.termination is TerminationReason.ITERATION_LIMIT
    assert all(b <= a for a, b in zip(trace.values, trace.values[1:])), f"Trace rose: {trace.values}"
    assert RegretOracle(problem, grid3_data).value(model) == pytest.approx(trace.final, abs=1e-12)


def test_local_search_on_demo_from_spo_plus(triangle_data):
    """T = 20, L = 20, eps = 1 from the SPO+ start never ends above its regret of 1."""
    problem = triangle_data.problem
    start, _ = solve_spo_plus_lp(problem, triangle_data)
    cfg = TrainConfig.create(ls_iters=20, ls_samples=20, ls_epsilon=1.0, seed=0)
    _, trace = local_search(problem, triangle_data, start, cfg)
    assert trace.values[0] == pytest.approx(1.0, abs=1e-6)
    assert trace.final <= 1.0 + 1e-9


def test_local_search_is_seeded(grid3_data):
    problem = grid3_data.problem
    start = LinearModel.zeros(problem.n, 3, bias=True)
    cfg = _small_cfg(seed=123, ls_epsilon=1.0)
    first, trace_a = local_search(problem, grid3_data, start, cfg)
    second, trace_b = local_search(problem, grid3_data, start, cfg)
    assert first == second
    assert trace_a.values == trace_b.values


def test_local_search_budget(grid3_data):
    """An exhausted budget stops before the first iteration and keeps the start."""
    problem = grid3_data.problem
    start = LinearModel.zeros(problem.n, 3, bias=True)
    model, trace = local_search(problem, grid3_data, start, _small_cfg(), budget_s=1e-9)
    assert trace.termination is TerminationReason.TIME_BUDGET
    assert trace.iterations == 0
    assert model == start


def test_local_search_zero_iterations(triangle_data):
    start = LinearModel.zeros(2, 1, bias=True)
    model, trace = local_search(triangle_data.problem, triangle_data, start, _small_cfg(ls_iters=0))
    assert model == start
    assert trace.values == [pytest.approx(10.0 / 3.0, abs=1e-6)]


# =============================================================================
# Alternating descent
# =============================================================================

def test_lp1_value_is_regret_plus_mean_optimum(triangle_data, grid3_data):
    rng = np.random.default_rng(8)
    good = LinearModel(omega=[[-1.0, -1.0], [-4.0, 1.0]], bias=True)
    lp1 = solve_lp1_fixed_omega(triangle_data.problem, triangle_data, good)
    assert lp1.regret == pytest.approx(1.0 / 3.0, abs=1e-6)
    assert lp1.offset == pytest.approx(-10.0 / 3.0, abs=1e-9)

    problem = grid3_data.problem
    oracle = RegretOracle(problem, grid3_data)
    for _ in range(3):
        model = LinearModel(omega=rng.standard_normal((problem.n, 4)), bias=True)
        lp1 = solve_lp1_fixed_omega(problem, grid3_data, model, oracle=oracle)
        assert lp1.regret == pytest.approx(oracle.value(model), abs=1e-6)


def test_lp2_never_worse_than_lp1(grid3_data):
    """The current omega is feasible for LP2, so its value cannot exceed LP1's."""
    problem = grid3_data.problem
    model, _ = solve_spo_plus_lp(problem, grid3_data)
    lp1 = solve_lp1_fixed_omega(problem, grid3_data, model)
    bound = max(1000.0, float(np.abs(model.omega).max()))
    candidate, lp2_value = solve_lp2_fixed_duals(problem, grid3_data, lp1.duals, bound, bias=True)
    assert lp2_value <= lp1.value + 1e-7
    assert np.all(np.abs(candidate.omega) <= bound + 1e-9)


def test_lp2_infeasible_on_unbounded_region():
    """{v1 + v2 >= 1, v >= 0} with all-zero duals: A'mu <= 0 can never equal c = (1, 1)."""
    halfplane = LPProblem.from_rows([0.0, 0.0], [([1.0, 1.0], "GE", 1.0)], var_lower=[0.0, 0.0])
    problem = NominalProblem.custom(halfplane, validate=False)
    dataset = Dataset(
        problem=problem,
        x=[[1.0]],
        c=[[1.0, 1.0]],
        train=(0,),
        test=(),
        gen_params=GenParams(n_samples=1, n_features=1),
    )
    structure = dual_structure(problem)
    duals = FixedDuals(
        mu=np.zeros((1, structure.n_mu)),
        delta=np.zeros((1, problem.n)),
        gamma=np.zeros(1),
    )
    with pytest.raises(InfeasibleProblem):
        solve_lp2_fixed_duals(problem, dataset, duals, 10.0, bias=True)


def test_lp1_and_lp2_past_deadline(grid3_data):
    problem = grid3_data.problem
    model, _ = solve_spo_plus_lp(problem, grid3_data)
    past = time.perf_counter() - 1.0
    with pytest.raises(TimeBudgetExceeded):
        solve_lp1_fixed_omega(problem, grid3_data, model, deadline=past)
    lp1 = solve_lp1_fixed_omega(problem, grid3_data, model)
    with pytest.raises(TimeBudgetExceeded):
        solve_lp2_fixed_duals(problem, grid3_data, lp1.duals, 1000.0, deadline=past)


def test_alternating_stops_when_an_lp_runs_out_of_time(grid3_data, monkeypatch):
    """A deadline hit inside LP2 ends the run with the incumbent model."""
    def out_of_time(*args, **kwargs):
        raise TimeBudgetExceeded("LP2 ran past its deadline")

    monkeypatch.setattr(importlib.import_module("dflregret.training.alternating"), "solve_lp2_fixed_duals", out_of_time)
    problem = grid3_data.problem
    start, _ = solve_spo_plus_lp(problem, grid3_data)
    model, trace = alternating(problem, grid3_data, start, _small_cfg(), budget_s=60.0)
    assert trace.termination is TerminationReason.TIME_BUDGET
    assert trace.iterations == 0
    assert model == start


def test_alternating_trace_never_rises(grid3_data):
    problem = grid3_data.problem
    start, _ = solve_spo_plus_lp(problem, grid3_data)
    model, trace = alternating(problem, grid3_data, start, _small_cfg(alt_iters=8))
    assert all(b <= a + 1e-7 for a, b in zip(trace.values, trace.values[1:])), f"Trace rose: {trace.values}"
    oracle = RegretOracle(problem, grid3_data)
    assert oracle.value(model) == pytest.approx(min(trace.values), abs=1e-9)
    assert oracle.value(model) <= oracle.value(start) + 1e-9


def test_alternating_on_demo_from_spo_plus(triangle_data):
    problem = triangle_data.problem
    start, _ = solve_spo_plus_lp(problem, triangle_data)
    _, trace = alternating(problem, triangle_data, start, _small_cfg(alt_iters=10))
    assert min(trace.values) <= 1.0 + 1e-7


def test_alternating_zero_iterations(triangle_data):
    start = LinearModel(omega=[[-1.0, -1.0], [-4.0, 1.0]], bias=True)
    model, trace = alternating(triangle_data.problem, triangle_data, start, _small_cfg(alt_iters=0))
    assert model == start
    assert trace.iterations == 0


@pytest.mark.slow
def test_alternating_monotone_sweep():
    """20 seeded grid instances: every ALT trace is non-increasing within 1e-7."""
    problem = grid_shortest_path(3, 3)
    for seed in range(20):
        dataset = generate(problem, n_samples=15, n_features=3, deg=4, noise=0.5, seed=seed)
        start, _ = solve_spo_plus_lp(problem, dataset)
        _, trace = alternating(problem, dataset, start, _small_cfg(alt_iters=10))
        assert all(b <= a + 1e-7 for a, b in zip(trace.values, trace.values[1:])), \
            f"seed {seed}: {trace.values}"


# =============================================================================
# Configuration and pipeline
# =============================================================================

def test_train_config_validation():
    with pytest.raises(InvalidParam):
        TrainConfig.create(ls_samples=0)
    with pytest.raises(InvalidParam):
        TrainConfig.create(omega_bound=-1.0)


def test_train_config_defaults_per_problem():
    assert TrainConfig.for_problem(ProblemKind.SHORTEST_PATH).ls_epsilon == 0.1
    assert TrainConfig.for_problem(ProblemKind.MATCHING).ls_epsilon == 1.0
    assert TrainConfig.for_problem(ProblemKind.MATCHING, ls_epsilon=0.5).ls_epsilon == 0.5
    assert TrainConfig.for_problem(ProblemKind.MATCHING, ls_epsilon=None).ls_epsilon == 1.0


def test_train_config_reads_training_block():
    set_config({"training": {"ls_iters": 7, "alt_patience": 2}})
    cfg = TrainConfig.from_config()
    assert cfg.ls_iters == 7
    assert cfg.alt_patience == 2


def test_parse_method():
    assert parse_method("spo-ls-alt") == [Stage.SPO, Stage.LS, Stage.ALT]
    assert parse_method("SPO") == [Stage.SPO]
    with pytest.raises(InvalidParam):
        parse_method("ALT-SPO")


def test_stage_budgets():
    """ALT inherits the LS budget when LS is skipped."""
    cfg = _small_cfg(ls_budget_s=10.0, alt_budget_s=20.0)
    assert stage_budgets([Stage.SPO, Stage.ALT], cfg)[Stage.ALT] == 30.0
    assert stage_budgets([Stage.SPO, Stage.LS, Stage.ALT], cfg)[Stage.ALT] == 20.0
    assert stage_budgets([Stage.SPO, Stage.LS], cfg)[Stage.LS] == 10.0


def test_pipeline_rejects_bad_sequences(triangle_data):
    cfg = _small_cfg()
    with pytest.raises(InvalidParam):
        pipeline(triangle_data.problem, triangle_data, ["LS", "ALT"], cfg)
    with pytest.raises(InvalidParam):
        pipeline(triangle_data.problem, triangle_data, ["SPO", "SPO"], cfg)


def test_pipeline_stages_never_increase(grid3_data):
    problem = grid3_data.problem
    model, reports = pipeline(problem, grid3_data, ["SPO", "LS", "ALT"], _small_cfg())
    regrets = [r.train_regret for r in reports]
    assert [r.stage for r in reports] == ["SPO", "LS", "ALT"]
    assert all(b <= a + 1e-7 for a, b in zip(regrets, regrets[1:])), f"Stages rose: {regrets}"
    assert reports[-1].model is model
    assert RegretOracle(problem, grid3_data).value(model) == pytest.approx(regrets[-1], abs=1e-9)
    assert "model" not in reports[0].to_dict()


def test_pipeline_reuses_a_finished_spo_stage(grid3_data, monkeypatch):
    pipeline_module = importlib.import_module("dflregret.training.pipeline")
    calls = []
    original = pipeline_module.solve_spo_plus_lp

    def counting(*args, **kwargs):
        calls.append(1)
        return original(*args, **kwargs)

    monkeypatch.setattr(pipeline_module, "solve_spo_plus_lp", counting)
    problem = grid3_data.problem
    cfg = _small_cfg()
    _, full = pipeline(problem, grid3_data, ["SPO", "LS", "ALT"], cfg)
    _, direct = pipeline(problem, grid3_data, ["SPO", "ALT"], cfg, spo=full[0])
    assert len(calls) == 1, f"SPO+ solved {len(calls)} times"
    assert direct[0] is full[0]
    assert direct[1].train_regret <= full[0].train_regret + 1e-7


def test_pipeline_rejects_reuse_of_other_stages(grid3_data):
    problem = grid3_data.problem
    _, reports = pipeline(problem, grid3_data, ["SPO", "LS"], _small_cfg())
    with pytest.raises(InvalidParam):
        pipeline(problem, grid3_data, ["SPO", "ALT"], _small_cfg(), spo=reports[1])


def test_pipeline_spo_budget_is_a_hard_cap(grid3_data):
    with pytest.raises(TimeBudgetExceeded):
        pipeline(grid3_data.problem, grid3_data, ["SPO", "LS"], _small_cfg(spo_budget_s=1e-9))


@pytest.mark.slow
def test_pipeline_budget_accounting():
    """LS gets 2 s and ALT 4 s; ALT alone inherits both. Each stage may overrun by at most 1 s."""
    problem = grid_shortest_path(5, 5)
    dataset = generate(problem, n_samples=50, n_features=5, deg=8, noise=0.5, seed=2)
    cfg = TrainConfig.create(
        ls_iters=100_000, alt_iters=100_000, alt_tol=0.0, alt_patience=100_000,
        ls_epsilon=0.1, ls_budget_s=2.0, alt_budget_s=4.0, seed=0,
    )
    _, full = pipeline(problem, dataset, ["SPO", "LS", "ALT"], cfg)
    ls, alt = full[1], full[2]
    assert ls.wall_s <= 3.0, f"LS took {ls.wall_s:.2f} s on a 2 s budget"
    assert alt.wall_s <= 5.0, f"ALT took {alt.wall_s:.2f} s on a 4 s budget"

    _, direct = pipeline(problem, dataset, ["SPO", "ALT"], cfg, spo=full[0])
    assert direct[1].wall_s <= 7.0, f"ALT took {direct[1].wall_s:.2f} s on a 6 s budget"


@pytest.mark.slow
@pytest.mark.parametrize(
    "problem",
    [grid_shortest_path(5, 5), bipartite_matching(13, 12, 40, seed=0)],
    ids=["sp5x5", "bm13x12"],
)
def test_local_search_and_alternating_improve_on_spo_plus(problem):
    """Neither refinement ends above SPO+; at high degree at least one ends strictly below."""
    strict = False
    for deg in (2, 8, 16):
        for noise in (0.0, 0.5):
            dataset = generate(problem, n_samples=50, n_features=5, deg=deg, noise=noise, seed=deg * 10 + int(noise * 2))
            cfg = TrainConfig.for_problem(problem.kind, seed=0, ls_budget_s=2.0, alt_budget_s=4.0)
            _, full = pipeline(problem, dataset, ["SPO", "LS", "ALT"], cfg)
            _, direct = pipeline(problem, dataset, ["SPO", "ALT"], cfg, spo=full[0])
            spo = full[0].train_regret
            refined = {"SPO-LS": full[1].train_regret, "SPO-LS-ALT": full[2].train_regret, "SPO-ALT": direct[1].train_regret}
            for method, value in refined.items():
                assert value <= spo + 1e-7, f"deg {deg} noise {noise}: {method} {value} above SPO {spo}"
            if deg >= 8 and min(refined.values()) < spo - 1e-7:
                strict = True
    assert strict, f"{problem.name}: no deg 8/16 instance improved on SPO+"
