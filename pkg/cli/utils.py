"""Helpers shared by the CLI commands: exit codes, instance building and the benchmark harness."""

import json
import re
from concurrent.futures import ThreadPoolExecutor, as_completed
from functools import wraps
from pathlib import Path
from typing import Dict, List, Optional, Tuple

import numpy as np
import pandas as pd
import structlog
import typer
import yaml
from pydantic import ValidationError
from rich.console import Console
from rich.table import Table
from tqdm import tqdm

from cli.models import (
    BENCH_COLUMNS,
    BENCH_METHODS,
    SUITE_ALIASES,
    SUITES,
    BenchInstance,
    BenchRow,
    ProblemSpec,
)
from dflregret.config import get_config
from dflregret.data import Dataset, Split, generate, save
from dflregret.errors import (
    DatasetIoError,
    DegenerateNormalization,
    InfeasibleProblem,
    InvalidDimension,
    InvalidParam,
    MalformedProblem,
    NumericalFailure,
    SchemaError,
    TimeBudgetExceeded,
    UnboundedProblem,
)
from dflregret.problems import NominalProblem, bipartite_matching, grid_shortest_path
from dflregret.regret import RegretOracle
from dflregret.training import StageReport, TrainConfig, pipeline

console = Console()
err_console = Console(stderr=True)
logger = structlog.get_logger()

EXIT_INVALID = 2
EXIT_IO = 3
EXIT_NUMERICAL = 4


def exit_code_for(error: Exception) -> Optional[int]:
    """Exit code of a failure, or None for errors that are bugs."""
    if isinstance(error, (InvalidParam, InvalidDimension, MalformedProblem, ValidationError)):
        return EXIT_INVALID
    if isinstance(error, (DatasetIoError, SchemaError, OSError, yaml.YAMLError)):
        return EXIT_IO
    if isinstance(error, (
        NumericalFailure,
        InfeasibleProblem,
        UnboundedProblem,
        DegenerateNormalization,
        TimeBudgetExceeded,
    )):
        return EXIT_NUMERICAL
    return None


def handle_errors(func):
    """Turn library errors into a red message and the matching exit code."""
    @wraps(func)
    def wrapper(*args, **kwargs):
        try:
            return func(*args, **kwargs)
        except typer.Exit:
            raise
        except Exception as e:
            code = exit_code_for(e)
            if code is None:
                raise
            logger.error("command_failed", command=func.__name__, error=str(e), exit_code=code)
            err_console.print(f"[red]Error: {e}[/red]")
            raise typer.Exit(code) from e

    return wrapper


def fail(message: str, code: int = EXIT_INVALID) -> None:
    err_console.print(f"[red]Error: {message}[/red]")
    raise typer.Exit(code)


def parse_grid(text: str) -> Tuple[int, int]:
    """'5x5' -> (5, 5)."""
    match = re.fullmatch(r"\s*(\d+)\s*[xX]\s*(\d+)\s*", text or "")
    if not match:
        raise InvalidParam(f"grid must look like ROWSxCOLS, got {text!r}")
    return int(match.group(1)), int(match.group(2))


def build_problem(spec: ProblemSpec, seed: int = 0) -> NominalProblem:
    if spec.kind == "sp":
        return grid_shortest_path(*spec.grid)
    if spec.kind == "bm":
        return bipartite_matching(spec.left, spec.right, spec.edges, seed=seed)
    raise InvalidParam(f"unknown problem kind {spec.kind!r}")


def emit_json(payload: Dict) -> None:
    """Machine-readable output on stdout."""
    typer.echo(json.dumps(payload, indent=1, default=float))


def write_json(payload: Dict, path: Path) -> Path:
    try:
        path.parent.mkdir(parents=True, exist_ok=True)
        path.write_text(json.dumps(payload, indent=1, default=float), encoding="utf-8")
    except OSError as e:
        raise DatasetIoError(f"Cannot write {path}: {e}") from e
    return path


def stage_table(reports: List[StageReport], title: str) -> Table:
    table = Table(title=title)
    table.add_column("Stage", style="cyan")
    table.add_column("Train regret", justify="right")
    table.add_column("Iterations", justify="right")
    table.add_column("Wall (s)", justify="right")
    table.add_column("Stopped by")
    for report in reports:
        table.add_row(
            report.stage,
            f"{report.train_regret:.6g}",
            str(report.iterations),
            f"{report.wall_s:.2f}",
            report.termination.value,
        )
    return table


def frame_table(frame: pd.DataFrame, title: str) -> Table:
    table = Table(title=title)
    for column in frame.columns:
        table.add_column(str(column), justify="right" if frame[column].dtype.kind in "if" else "left")
    for row in frame.itertuples(index=False):
        table.add_row(*[f"{v:.4g}" if isinstance(v, float) else str(v) for v in row])
    return table


# Benchmark harness


def expand_suite(name: str, seed: int) -> List[BenchInstance]:
    """Instances of a suite in (problem, N, deg, noise) order, each with its own seed."""
    key = SUITE_ALIASES.get(name, name)
    if key not in SUITES:
        raise InvalidParam(f"unknown suite {name!r}; expected one of {sorted(SUITES)}")
    suite = SUITES[key]
    grid = [
        (problem, n_samples, deg, noise)
        for problem in suite.problems
        for n_samples in suite.n_samples
        for deg in suite.degs
        for noise in suite.noises
    ]
    seeds = np.random.SeedSequence(seed).generate_state(len(grid))
    return [
        BenchInstance(
            index=i,
            problem=problem,
            n_samples=n_samples,
            deg=deg,
            noise=noise,
            n_features=suite.n_features,
            seed=int(seeds[i]),
        )
        for i, (problem, n_samples, deg, noise) in enumerate(grid)
    ]


def instance_tag(instance: BenchInstance) -> str:
    noise = f"{instance.noise:g}".replace(".", "p")
    return f"{instance.index:03d}_{instance.problem.label}_N{instance.n_samples}_deg{instance.deg}_noise{noise}"


def run_instance(instance: BenchInstance, scale: float, artifacts: Optional[Path] = None) -> List[BenchRow]:
    """Train every benchmark method on one instance and score it on both splits."""
    bench_cfg = get_config()["bench"]
    problem = build_problem(instance.problem, instance.seed)
    dataset: Dataset = generate(
        problem,
        n_samples=instance.n_samples,
        n_features=instance.n_features,
        deg=instance.deg,
        noise=instance.noise,
        seed=instance.seed,
    )
    cfg = TrainConfig.for_problem(
        problem.kind,
        seed=instance.seed,
        ls_budget_s=bench_cfg["ls_budget_s"] * scale,
        alt_budget_s=bench_cfg["alt_budget_s"] * scale,
    )
    oracles = {split: RegretOracle(problem, dataset, split) for split in (Split.TRAIN, Split.TEST)}

    _, full = pipeline(problem, dataset, ["SPO", "LS", "ALT"], cfg, oracle=oracles[Split.TRAIN])
    _, direct = pipeline(problem, dataset, ["SPO", "ALT"], cfg, oracle=oracles[Split.TRAIN], spo=full[0])
    runs = {"SPO": full[:1], "SPO-LS": full[:2], "SPO-LS-ALT": full, "SPO-ALT": direct}

    tag = instance_tag(instance)
    if artifacts is not None:
        save(dataset, artifacts / f"{tag}_data.json")

    rows = []
    for method in BENCH_METHODS:
        stages = runs[method]
        model = stages[-1].model
        wall = sum(s.wall_s for s in stages)
        iters = sum(s.iterations for s in stages)
        for split, oracle in oracles.items():
            report = oracle.report(model)
            rows.append(
                BenchRow(
                    problem=instance.problem.label,
                    N=instance.n_samples,
                    deg=instance.deg,
                    noise=instance.noise,
                    method=method,
                    split=split.value,
                    mean_regret=report.mean_regret,
                    normalized_regret=report.normalized_regret,
                    wall_s=wall,
                    iters=iters,
                )
            )
        if artifacts is not None:
            model.save(artifacts / f"{tag}_{method}.json")

    logger.info("bench_instance_finished", tag=tag, seed=instance.seed)
    return rows


def run_bench(
    name: str,
    seed: int,
    scale: float,
    workers: int = 1,
    artifacts: Optional[Path] = None,
    progress: bool = True,
) -> Tuple[pd.DataFrame, List[BenchInstance]]:
    """Run a suite; rows come back in instance order whatever the worker count."""
    if not scale > 0.0:
        raise InvalidParam(f"scale must be positive, got {scale}")
    if workers < 1:
        raise InvalidParam(f"workers must be >= 1, got {workers}")
    instances = expand_suite(name, seed)

    results: Dict[int, List[BenchRow]] = {}
    with ThreadPoolExecutor(max_workers=workers) as executor:
        futures = {executor.submit(run_instance, inst, scale, artifacts): inst.index for inst in instances}
        with tqdm(total=len(futures), desc=f"bench {name}", disable=not progress) as bar:
            for future in as_completed(futures):
                results[futures[future]] = future.result()
                bar.update(1)

    rows = [row.model_dump() for index in sorted(results) for row in results[index]]
    frame = pd.DataFrame(rows, columns=BENCH_COLUMNS)
    frame["normalized_regret"] = pd.to_numeric(frame["normalized_regret"])
    return frame, instances


def write_bench(frame: pd.DataFrame, instances: List[BenchInstance], path: Path, suite: str, seed: int, scale: float) -> Path:
    """CSV with the fixed column set plus a ``<path>.seeds.json`` replay sidecar."""
    try:
        path.parent.mkdir(parents=True, exist_ok=True)
        frame.to_csv(path, index=False, columns=BENCH_COLUMNS)
    except OSError as e:
        raise DatasetIoError(f"Cannot write {path}: {e}") from e
    write_json(
        {
            "suite": suite,
            "seed": seed,
            "scale": scale,
            "instances": [
                {"tag": instance_tag(inst), **inst.model_dump(include={"index", "n_samples", "deg", "noise", "seed"})}
                for inst in instances
            ],
        },
        Path(f"{path}.seeds.json"),
    )
    logger.info("bench_written", path=str(path), rows=len(frame))
    return path


def summarize(frame: pd.DataFrame) -> pd.DataFrame:
    """Percent change of normalized regret against SPO on the same instance and split."""
    keys = ["problem", "N", "deg", "noise", "split"]
    baseline = frame[frame["method"] == "SPO"].set_index(keys)["normalized_regret"].rename("spo_normalized")
    summary = frame.join(baseline, on=keys)
    change = 100.0 * (summary["normalized_regret"] - summary["spo_normalized"]) / summary["spo_normalized"]
    summary["change_pct"] = change.replace([np.inf, -np.inf], np.nan)
    return summary[keys + ["method", "normalized_regret", "change_pct"]]
