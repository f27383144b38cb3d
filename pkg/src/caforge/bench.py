"""Experiment harness: repeated seeded runs, best/mean aggregation, CSV output.

An experiment grid is a text file with one configuration per line,

    <model-spec>;t=<t>;subs=<subs>;algo=<tlbo|atlbo>

where ``subs`` joins ``params:strength`` entries with ``+`` (or is ``none``).
Each experiment runs R times with seeds ``base_seed .. base_seed+R-1``;
repetitions can fan out over worker processes, capped by ``CAFORGE_WORKERS``.
"""

from __future__ import annotations

import csv
import os
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, replace

from .generator import (
    GeneratorConfig,
    RunRecord,
    explore_exploit_percentages,
    generate,
)
from .model import SystemModel, parse_model, render_model, render_subs

WORKERS_ENV = "CAFORGE_WORKERS"


@dataclass(frozen=True)
class Experiment:
    """One grid entry: a model configuration plus the algorithm to run."""

    model_spec: str
    t: int
    subs: tuple[tuple[str, int], ...] = ()
    algorithm: str = "atlbo"

    def build_model(self) -> SystemModel:
        return parse_model(self.model_spec, self.t, self.subs)


@dataclass
class Aggregate:
    """Best/mean statistics over one experiment's repetitions."""

    best_size: int
    mean_size: float
    best_time: float
    mean_time: float
    mean_explore_pct: float
    mean_exploit_pct: float
    run_count: int


@dataclass
class GridResult:
    experiment: Experiment
    config: GeneratorConfig
    repetitions: int
    aggregate: Aggregate
    records: list[RunRecord]


def resolve_workers(workers: int | None, repetitions: int) -> int:
    """Worker-count policy: explicit arg or CPU count, capped by the env var."""
    cap = os.environ.get(WORKERS_ENV)
    limit = workers if workers is not None else (os.cpu_count() or 1)
    if cap is not None:
        limit = min(limit, max(1, int(cap)))
    return max(1, min(limit, repetitions))


def _run_record(args) -> RunRecord:
    model, config = args
    return generate(model, config)[1]


def run_experiment(model: SystemModel, config_template: GeneratorConfig,
                   repetitions: int, base_seed: int,
                   workers: int | None = None) -> tuple[Aggregate, list[RunRecord]]:
    """Run R independent seeded repetitions and aggregate them.

    Seeds are ``base_seed + run_index``; aggregation is order-independent, so
    concurrent execution yields the same result as serial.
    """
    if repetitions < 1:
        raise ValueError(f"repetitions must be >= 1, got {repetitions}")
    configs = [replace(config_template, seed=base_seed + k) for k in range(repetitions)]
    n_workers = resolve_workers(workers, repetitions)
    if n_workers == 1:
        records = [_run_record((model, config)) for config in configs]
    else:
        with ProcessPoolExecutor(max_workers=n_workers) as pool:
            done = pool.map(_run_record, [(model, config) for config in configs])
            by_seed = {record.seed: record for record in done}
        records = [by_seed[config.seed] for config in configs]
    return aggregate(records), records


def aggregate(records: list[RunRecord]) -> Aggregate:
    sizes = [r.suite_size for r in records]
    times = [r.wall_seconds for r in records]
    shares = [explore_exploit_percentages(r) for r in records]
    n = len(records)
    return Aggregate(
        best_size=min(sizes),
        mean_size=sum(sizes) / n,
        best_time=min(times),
        mean_time=sum(times) / n,
        mean_explore_pct=sum(e for e, _ in shares) / n,
        mean_exploit_pct=sum(x for _, x in shares) / n,
        run_count=n,
    )


def parse_experiments(text: str) -> list[Experiment]:
    """Parse the grid file format; blank lines and ``#`` comments are skipped."""
    experiments = []
    for line_no, raw in enumerate(text.splitlines(), start=1):
        line = raw.strip()
        if not line or line.startswith("#"):
            continue
        fields = [f.strip() for f in line.split(";")]
        spec = fields[0]
        keys: dict[str, str] = {}
        for item in fields[1:]:
            if "=" not in item:
                raise ValueError(f"line {line_no}: bad field {item!r}")
            key, value = item.split("=", 1)
            keys[key.strip()] = value.strip()
        if "t" not in keys:
            raise ValueError(f"line {line_no}: missing t=<strength>")
        subs: list[tuple[str, int]] = []
        subs_text = keys.get("subs", "none")
        if subs_text and subs_text != "none":
            for part in subs_text.split("+"):
                params_text, _, strength = part.rpartition(":")
                if not params_text:
                    raise ValueError(f"line {line_no}: bad sub {part!r}")
                subs.append((params_text, int(strength)))
        experiments.append(Experiment(
            model_spec=spec,
            t=int(keys["t"]),
            subs=tuple(subs),
            algorithm=keys.get("algo", "atlbo"),
        ))
    return experiments


def run_grid(experiments: list[Experiment], repetitions: int, base_seed: int,
             population_size: int = 40, max_iterations: int | None = None,
             workers: int | None = None) -> list[GridResult]:
    """Run every experiment in order with the shared repetition settings."""
    results = []
    for experiment in experiments:
        model = experiment.build_model()
        config = GeneratorConfig(
            algorithm=experiment.algorithm,
            population_size=population_size,
            max_iterations=max_iterations,
            seed=base_seed,
        )
        agg, records = run_experiment(model, config, repetitions, base_seed,
                                      workers=workers)
        results.append(GridResult(experiment, config, repetitions, agg, records))
    return results


CSV_HEADER = [
    "model", "t", "subs", "algo", "pop", "iters", "reps",
    "best_size", "mean_size", "best_time_s", "mean_time_s",
    "mean_explore_pct", "mean_exploit_pct",
]


def emit_csv(results: list[GridResult], path) -> None:
    """Write the aggregate table; sizes as integers, reals with 2 decimals."""
    try:
        with open(path, "w", encoding="utf-8", newline="") as fh:
            writer = csv.writer(fh)
            writer.writerow(CSV_HEADER)
            for res in results:
                model = res.experiment.build_model()
                agg = res.aggregate
                writer.writerow([
                    render_model(model),
                    model.main_strength,
                    render_subs(model),
                    res.config.algorithm,
                    res.config.population_size,
                    res.config.iterations,
                    res.repetitions,
                    agg.best_size,
                    f"{agg.mean_size:.2f}",
                    f"{agg.best_time:.2f}",
                    f"{agg.mean_time:.2f}",
                    f"{agg.mean_explore_pct:.2f}",
                    f"{agg.mean_exploit_pct:.2f}",
                ])
    except OSError as err:
        raise OSError(f"cannot write results to {path}: {err}") from err


PHASES_HEADER = ["model", "t", "subs", "algo", "mean_explore_pct", "mean_exploit_pct"]


def emit_phases_csv(results: list[GridResult], path) -> None:
    """Companion file with just the per-config exploration/exploitation means."""
    try:
        with open(path, "w", encoding="utf-8", newline="") as fh:
            writer = csv.writer(fh)
            writer.writerow(PHASES_HEADER)
            for res in results:
                model = res.experiment.build_model()
                writer.writerow([
                    render_model(model),
                    model.main_strength,
                    render_subs(model),
                    res.config.algorithm,
                    f"{res.aggregate.mean_explore_pct:.2f}",
                    f"{res.aggregate.mean_exploit_pct:.2f}",
                ])
    except OSError as err:
        raise OSError(f"cannot write phase data to {path}: {err}") from err


def load_results(path) -> list[dict[str, str]]:
    """Read an emitted CSV back as a list of row dictionaries."""
    with open(path, encoding="utf-8", newline="") as fh:
        return list(csv.DictReader(fh))
