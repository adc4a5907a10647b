import os
import time
from pathlib import Path
from typing import Optional

import typer
import yaml
from dotenv import load_dotenv
from rich.panel import Panel
from rich.table import Table

# Load environment variables from .env file
load_dotenv()

from cli.models import MethodChoice, ModeChoice, ProblemChoice, ProblemSpec, SplitChoice, VariantChoice
from cli.utils import (
    EXIT_INVALID,
    EXIT_IO,
    build_problem,
    console,
    emit_json,
    fail,
    frame_table,
    handle_errors,
    parse_grid,
    run_bench,
    stage_table,
    summarize,
    write_bench,
    write_json,
)
from dflregret.certificates import zero_regret_certificate
from dflregret.config import get_config, load_layered_config
from dflregret.data import (
    Split,
    conflicting_pair_dataset,
    generate,
    load,
    save,
    square_demo_dataset,
    triangle_demo_dataset,
)
from dflregret.errors import SchemaError
from dflregret.logging_setup import configure_logging
from dflregret.reformulations import build_exact, build_penalized, export_lp_text
from dflregret.regret import LinearModel, RegretMode, RegretOracle
from dflregret.training import (
    StageReport,
    TerminationReason,
    TrainConfig,
    alternating,
    local_search,
    parse_method,
    pipeline,
    train_least_squares,
)

app = typer.Typer(
    name="dflregret",
    help="dflregret CLI: pessimistic-regret training of linear predictors for linear programs",
    add_completion=True,
)

DEMO_DATASETS = {
    ProblemChoice.TRIANGLE_DEMO: triangle_demo_dataset,
    ProblemChoice.SQUARE_DEMO: square_demo_dataset,
    ProblemChoice.CONFLICTING_DEMO: conflicting_pair_dataset,
}


def settings_path() -> Path:
    default = Path(__file__).resolve().parent.parent / "config" / "settings.yaml"
    return Path(os.getenv("DFLREGRET_SETTINGS", default))


@app.callback()
def main(
    config: Optional[Path] = typer.Option(None, "--config", help="YAML file layered over config/settings.yaml"),
    log_level: Optional[str] = typer.Option(None, "--log-level", help="DEBUG, INFO, WARNING or ERROR"),
    log_json: bool = typer.Option(False, "--log-json", help="Write log events as JSON lines"),
):
    """Flags win over --config, which wins over the environment and settings.yaml."""
    try:
        cfg = load_layered_config(settings_path=settings_path(), extra_path=config)
    except (OSError, SchemaError, yaml.YAMLError) as e:
        fail(f"cannot load configuration: {e}", EXIT_IO)
    level = log_level or cfg["logging"]["level"]
    configure_logging(level, json=log_json or bool(cfg["logging"].get("json", False)))


@app.command()
@handle_errors
def gen(
    problem: ProblemChoice = typer.Option(ProblemChoice.SHORTEST_PATH, "--problem", case_sensitive=False),
    grid: str = typer.Option("5x5", "--grid", help="Shortest-path grid as ROWSxCOLS"),
    left: int = typer.Option(13, "--left", help="Matching: left nodes"),
    right: int = typer.Option(12, "--right", help="Matching: right nodes"),
    edges: int = typer.Option(40, "--edges", help="Matching: edges"),
    n: int = typer.Option(100, "--n", help="Number of samples"),
    features: int = typer.Option(5, "--features", help="Number of features K"),
    deg: int = typer.Option(2, "--deg", help="Misspecification degree"),
    noise: float = typer.Option(0.5, "--noise", help="Multiplicative noise half-width"),
    seed: int = typer.Option(0, "--seed"),
    omega_law: str = typer.Option("bernoulli", "--omega-law", help="bernoulli or normal"),
    out: Path = typer.Option(..., "--out", help="Dataset JSON to write"),
):
    """Generate a synthetic dataset (or one of the worked-example datasets)."""
    if problem in DEMO_DATASETS:
        dataset = DEMO_DATASETS[problem]()
    else:
        if problem is ProblemChoice.SHORTEST_PATH:
            spec = ProblemSpec(kind="sp", grid=parse_grid(grid))
        else:
            spec = ProblemSpec(kind="bm", left=left, right=right, edges=edges)
        nominal = build_problem(spec, seed)
        dataset = generate(nominal, n, features, deg, noise, seed, omega_law=omega_law)

    save(dataset, out)
    console.print(
        f"[green]Wrote {dataset.n_samples} samples[/green] "
        f"({len(dataset.train)} train / {len(dataset.test)} test, n={dataset.problem.n}) to {out}"
    )


@app.command()
@handle_errors
def train(
    data: Path = typer.Option(..., "--data", help="Dataset JSON"),
    method: MethodChoice = typer.Option(MethodChoice.SPO, "--method", case_sensitive=False),
    init: Optional[Path] = typer.Option(None, "--init", help="Starting model (required for ls and alt)"),
    bias: bool = typer.Option(True, "--bias/--no-bias", help="Intercept column"),
    seed: Optional[int] = typer.Option(None, "--seed", help="Local-search seed"),
    epsilon: Optional[float] = typer.Option(None, "--epsilon", help="Local-search perturbation scale"),
    ls_samples: Optional[int] = typer.Option(None, "--ls-samples"),
    ls_iters: Optional[int] = typer.Option(None, "--ls-iters"),
    alt_iters: Optional[int] = typer.Option(None, "--alt-iters"),
    budget_spo: Optional[float] = typer.Option(None, "--budget-spo", help="Cap on the SPO+ LP in seconds"),
    budget_ls: Optional[float] = typer.Option(None, "--budget-ls", help="LS budget in seconds"),
    budget_alt: Optional[float] = typer.Option(None, "--budget-alt", help="ALT budget in seconds"),
    bound: Optional[float] = typer.Option(None, "--bound", help="|omega| box of the LP2 step"),
    workers: Optional[int] = typer.Option(None, "--workers"),
    out: Optional[Path] = typer.Option(None, "--out", help="Model JSON to write"),
    trace: Optional[Path] = typer.Option(None, "--trace", help="Trace JSON to write"),
    as_json: bool = typer.Option(False, "--json", help="Print a JSON summary"),
):
    """Train a model with one of the pipelines."""
    if method in (MethodChoice.LS, MethodChoice.ALT) and init is None:
        fail(f"--method {method.value} needs a starting model; pass --init MODEL")

    dataset = load(data)
    problem = dataset.problem
    cfg = TrainConfig.for_problem(
        problem.kind,
        seed=seed,
        ls_epsilon=epsilon,
        ls_samples=ls_samples,
        ls_iters=ls_iters,
        alt_iters=alt_iters,
        spo_budget_s=budget_spo,
        ls_budget_s=budget_ls,
        alt_budget_s=budget_alt,
        omega_bound=bound,
        workers=workers,
        bias=bias,
    )
    oracle = RegretOracle(problem, dataset, Split.TRAIN, workers=cfg.workers)

    if method is MethodChoice.LSQ:
        tic = time.perf_counter()
        model = train_least_squares(problem, dataset, bias=cfg.bias)
        reports = [
            StageReport("LSQ", oracle.value(model), time.perf_counter() - tic, 1, TerminationReason.SOLVED, model=model)
        ]
    elif method in (MethodChoice.LS, MethodChoice.ALT):
        start = LinearModel.load(init)
        start.check_dimensions(problem.n, dataset.n_features)
        trainer = local_search if method is MethodChoice.LS else alternating
        tic = time.perf_counter()
        model, stage_trace = trainer(problem, dataset, start, cfg, oracle=oracle)
        reports = [
            StageReport(
                method.value.upper(),
                oracle.value(model),
                time.perf_counter() - tic,
                stage_trace.iterations,
                stage_trace.termination,
                trace=stage_trace,
                model=model,
            )
        ]
    else:
        model, reports = pipeline(problem, dataset, parse_method(method.value), cfg, oracle=oracle)

    out = out or data.with_name(f"{data.stem}.{method.value}.model.json")
    trace = trace or out.with_suffix(".trace.json")
    model.save(out)
    write_json(
        {
            "method": method.value,
            "data": str(data),
            "model": str(out),
            "config": cfg.model_dump(),
            "stages": [r.to_dict() for r in reports],
        },
        trace,
    )

    if as_json:
        emit_json({"method": method.value, "model": str(out), "trace": str(trace), "stages": [r.to_dict() for r in reports]})
        return
    console.print(stage_table(reports, title=f"{method.value} on {data.name}"))
    console.print(f"Model written to [cyan]{out}[/cyan], trace to [cyan]{trace}[/cyan]")


@app.command("eval")
@handle_errors
def evaluate(
    model: Path = typer.Option(..., "--model", help="Model JSON"),
    data: Path = typer.Option(..., "--data", help="Dataset JSON"),
    split: SplitChoice = typer.Option(SplitChoice.TEST, "--split", case_sensitive=False),
    mode: ModeChoice = typer.Option(ModeChoice.PESSIMISTIC, "--mode", case_sensitive=False),
    workers: int = typer.Option(1, "--workers"),
    as_json: bool = typer.Option(False, "--json"),
):
    """Mean and normalized regret of a model on a dataset split."""
    dataset = load(data)
    linear = LinearModel.load(model)
    oracle = RegretOracle(dataset.problem, dataset, Split(split.value), workers=workers)
    report = oracle.report(linear, RegretMode(mode.value))

    if as_json:
        emit_json({"split": split.value, "n_samples": oracle.n_samples, **report.to_dict()})
        return
    table = Table(title=f"{mode.value} regret on {split.value} ({oracle.n_samples} samples)")
    table.add_column("Mean regret", justify="right")
    table.add_column("Normalized regret", justify="right")
    normalized = report.normalized_regret
    table.add_row(f"{report.mean_regret:.6g}", "n/a" if normalized is None else f"{normalized:.6g}")
    console.print(table)


@app.command("zero-regret")
@handle_errors
def zero_regret(
    data: Path = typer.Option(..., "--data", help="Dataset JSON"),
    bias: bool = typer.Option(False, "--bias/--no-bias"),
    split: SplitChoice = typer.Option(SplitChoice.TRAIN, "--split", case_sensitive=False),
    workers: int = typer.Option(1, "--workers"),
    as_json: bool = typer.Option(False, "--json"),
):
    """Decide whether a zero-regret linear model exists for the data."""
    dataset = load(data)
    verdict = zero_regret_certificate(dataset.problem, dataset, bias=bias, split=Split(split.value), workers=workers)

    if as_json:
        emit_json(verdict.to_dict())
        return
    colour = {"Yes": "green", "No": "red"}.get(verdict.answer.value, "yellow")
    body = f"[bold {colour}]{verdict.answer.value}[/bold {colour}]"
    if verdict.certificate is not None:
        body += f"\n\nomega = {verdict.certificate.omega.tolist()}\nregret = {verdict.regret:.3g}"
    elif verdict.answer.value == "AssumptionViolated":
        flagged = [i for i, r in enumerate(verdict.uniqueness_report) if not r.unique]
        body += f"\n\nsamples without a unique optimum: {flagged}"
    console.print(Panel(body, title="Zero regret", border_style=colour))


@app.command("export-qcqp")
@handle_errors
def export_qcqp(
    data: Path = typer.Option(..., "--data", help="Dataset JSON"),
    variant: VariantChoice = typer.Option(VariantChoice.EXACT, "--variant", case_sensitive=False),
    kappa: Optional[float] = typer.Option(None, "--kappa", help="Fixed gamma of the penalized slice"),
    bound: Optional[float] = typer.Option(None, "--bound", help="|omega| box"),
    cutoff: Optional[bool] = typer.Option(None, "--cutoff/--no-cutoff", help="Add objective >= mean z*"),
    bias: bool = typer.Option(False, "--bias/--no-bias"),
    out: Path = typer.Option(..., "--out", help="LP file to write"),
    as_json: bool = typer.Option(False, "--json"),
):
    """Write the single-level QCQP in LP format with a metadata sidecar."""
    dataset = load(data)
    settings = get_config()["reformulations"]
    bound = settings["omega_bound"] if bound is None else bound
    if variant is VariantChoice.EXACT:
        cutoff = settings["with_cutoff"] if cutoff is None else cutoff
        model = build_exact(dataset.problem, dataset, bound, with_cutoff=cutoff, bias=bias)
    else:
        kappa = settings["kappa"] if kappa is None else kappa
        model = build_penalized(dataset.problem, dataset, kappa, bound, bias=bias)
    export_lp_text(model, out)

    if as_json:
        emit_json({"path": str(out), **model.metadata})
        return
    table = Table(title=f"{variant.value} QCQP written to {out}")
    table.add_column("Quantity")
    table.add_column("Count", justify="right")
    for name, value in model.metadata["counts"].items():
        table.add_row(name, str(value))
    console.print(table)


@app.command()
@handle_errors
def bench(
    suite: str = typer.Option(
        "tiny", "--suite", help="tiny, paper-n50 or paper-small (bench-n50 and bench-small are aliases)"
    ),
    seed: int = typer.Option(0, "--seed"),
    scale: Optional[float] = typer.Option(None, "--scale", help="Multiplier of the per-stage time budgets"),
    workers: Optional[int] = typer.Option(None, "--workers", help="Instances run concurrently"),
    out: Optional[Path] = typer.Option(None, "--out", help="CSV to write"),
    artifacts: Optional[Path] = typer.Option(None, "--artifacts", help="Directory for dataset and model files"),
    summary: bool = typer.Option(False, "--summary", help="Print percent change against SPO"),
    progress: bool = typer.Option(True, "--progress/--no-progress"),
):
    """Run a benchmark suite and write one CSV row per (instance, method, split)."""
    if not suite.strip():
        fail("--suite must not be empty", EXIT_INVALID)
    cfg = get_config()
    scale = cfg["bench"]["scale"] if scale is None else scale
    workers = cfg["bench"]["workers"] if workers is None else workers
    out = out or Path(cfg["results_dir"]) / f"bench_{suite}.csv"

    frame, instances = run_bench(suite, seed, scale, workers=workers, artifacts=artifacts, progress=progress)
    write_bench(frame, instances, out, suite=suite, seed=seed, scale=scale)

    if summary:
        console.print(frame_table(summarize(frame), title=f"{suite}: change against SPO (%)"))
    else:
        console.print(frame_table(frame, title=f"{suite} ({len(instances)} instances)"))
    console.print(f"CSV written to [cyan]{out}[/cyan]")


if __name__ == "__main__":
    app()
