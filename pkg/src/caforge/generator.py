"""One-test-at-a-time suite construction over the uncovered-tuple store.

Each commit cycle re-randomizes the population, optimizes it for a fixed
number of sweeps against whatever is still uncovered, commits the best
candidate, and removes the tuples it covers.  The loop ends when the store is
empty, so the returned suite always verifies.
"""

from __future__ import annotations

import time
from dataclasses import dataclass, field

import numpy as np

from .fuzzy import FuzzyEngine
from .model import SystemModel, render_model, render_subs
from .search import (
    Candidate,
    TRACE_HEADER,
    atlbo_sweep,
    init_population,
    tlbo_sweep,
)
from .tuples import TupleStore, mask_params

ALGORITHMS = ("tlbo", "atlbo")
DEFAULT_ITERATIONS = {"atlbo": 100, "tlbo": 50}


@dataclass(frozen=True)
class GeneratorConfig:
    """Run parameters; ``max_iterations=None`` means the per-algorithm default
    (100 adaptive sweeps, or 50 plain sweeps for the same evaluation budget)."""

    algorithm: str = "atlbo"
    population_size: int = 40
    max_iterations: int | None = None
    seed: int = 0
    dm_literal: bool = False

    def __post_init__(self):
        if self.algorithm not in ALGORITHMS:
            raise ValueError(f"unknown algorithm {self.algorithm!r}")
        if self.population_size < 2:
            raise ValueError(f"population size must be >= 2, got {self.population_size}")
        if self.max_iterations is not None and self.max_iterations < 1:
            raise ValueError(f"max iterations must be >= 1, got {self.max_iterations}")

    @property
    def iterations(self) -> int:
        if self.max_iterations is not None:
            return self.max_iterations
        return DEFAULT_ITERATIONS[self.algorithm]


@dataclass
class RunRecord:
    """Per-run statistics behind the benchmark tables."""

    suite_size: int
    wall_seconds: float
    eval_count: int
    explore_count: int
    exploit_count: int
    seed: int


@dataclass
class TestSuite:
    """The final ordered list of committed test cases."""

    model: SystemModel
    tests: list[Candidate] = field(default_factory=list)

    def __len__(self) -> int:
        return len(self.tests)

    def rows(self) -> list[tuple[int, ...]]:
        return [t.values for t in self.tests]


def rescue_candidate(store: TupleStore) -> Candidate:
    """Deterministic test built from the lowest remaining tuple.

    Masked positions take the tuple's values; don't-care positions take 0.
    Used when a cycle's best covers nothing, so every commit removes >= 1.
    """
    found = store.first_uncovered()
    if found is None:
        raise ValueError("store is already empty")
    mask, tuple_values = found
    values = [0] * store.model.param_count
    for param, v in zip(mask_params(mask), tuple_values):
        values[param] = v
    return Candidate(tuple(values), store.fitness(values))


def generate(model: SystemModel, config: GeneratorConfig,
             trace=None, fuzzy_diagnostics=None) -> tuple[TestSuite, RunRecord]:
    """Build a covering suite for the model; returns the suite and run record."""
    start = time.perf_counter()
    store = TupleStore(model)
    rng = np.random.default_rng(config.seed)
    engine = None
    if config.algorithm == "atlbo":
        engine = FuzzyEngine(diagnostics=fuzzy_diagnostics)
        if fuzzy_diagnostics is not None:
            fuzzy_diagnostics.write("qm,im,dm,r1,r2,r3,r4,out,phase\n")
    if trace is not None:
        trace.write(TRACE_HEADER)

    suite = TestSuite(model)
    evals = explores = exploits = 0
    while store.remaining > 0:
        state = init_population(model, config.population_size, rng, store)
        for _ in range(config.iterations):
            if engine is not None:
                atlbo_sweep(state, store, engine, dm_literal=config.dm_literal,
                            trace=trace)
            else:
                tlbo_sweep(state, store, trace=trace)
        evals += state.eval_count
        explores += state.explore_count
        exploits += state.exploit_count

        best = state.best
        if best.fitness == 0:
            best = rescue_candidate(store)
        removed = store.remove_covered(best.values)
        suite.tests.append(Candidate(best.values, removed))

    record = RunRecord(
        suite_size=len(suite),
        wall_seconds=round(time.perf_counter() - start, 3),
        eval_count=evals,
        explore_count=explores,
        exploit_count=exploits,
        seed=config.seed,
    )
    return suite, record


def explore_exploit_percentages(record: RunRecord) -> tuple[float, float]:
    """Exploration and exploitation shares of all phase executions; sums to 100.

    A run with no phase executions reports the fixed 50/50 split.
    """
    total = record.explore_count + record.exploit_count
    if total == 0:
        return 50.0, 50.0
    explore = 100.0 * record.explore_count / total
    return explore, 100.0 - explore


def suite_header(model: SystemModel, config: GeneratorConfig, size: int) -> str:
    return (
        f"# model={render_model(model)} t={model.main_strength}"
        f" subs={render_subs(model)} algo={config.algorithm}"
        f" seed={config.seed} size={size}"
    )


def format_suite(suite: TestSuite, config: GeneratorConfig) -> str:
    """Suite file content: header comment, then one comma-separated test per line."""
    lines = [suite_header(suite.model, config, len(suite))]
    lines.extend(",".join(str(v) for v in test.values) for test in suite.tests)
    return "\n".join(lines) + "\n"


def write_suite(suite: TestSuite, config: GeneratorConfig, path) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        fh.write(format_suite(suite, config))


def read_suite(path) -> list[tuple[int, ...]]:
    """Parse a suite file back into value-index rows (header lines are skipped)."""
    rows: list[tuple[int, ...]] = []
    with open(path, encoding="utf-8") as fh:
        for line_no, line in enumerate(fh, start=1):
            line = line.strip()
            if not line or line.startswith("#"):
                continue
            try:
                rows.append(tuple(int(v) for v in line.split(",")))
            except ValueError as err:
                raise ValueError(f"{path}:{line_no}: bad test row {line!r}") from err
    return rows
