"""Population kernels: plain teacher/learner optimization and its fuzzy-adaptive variant.

Candidates are integer vectors, one value index per parameter.  The plain
sweep runs the teacher (global) and learner (local) phase back to back for
every member; the adaptive sweep asks the fuzzy engine which single phase to
run.  Updates are rounded half-away-from-zero and clamped by absorbing walls,
and a move is only accepted when strictly better.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from . import fuzzy
from .model import SystemModel
from .tuples import TupleStore


@dataclass(frozen=True)
class Candidate:
    """An immutable candidate snapshot with its cached coverage fitness."""

    values: tuple[int, ...]
    fitness: int


class SearchState:
    """Mutable optimizer state, confined to a single run.

    Tracks the population matrix with cached fitness, the best candidate seen
    this commit cycle, the seeded random stream, and evaluation / phase
    counters.
    """

    def __init__(self, model: SystemModel, population: np.ndarray,
                 fitness: np.ndarray, rng: np.random.Generator):
        self.model = model
        self.population = population
        self.fitness = fitness
        best = int(np.argmax(fitness))  # ties resolve to the lowest index
        self.best_values = population[best].copy()
        self.best_fitness = int(fitness[best])
        self.rng = rng
        self.eval_count = len(population)
        self.explore_count = 0
        self.exploit_count = 0
        self.sweep_index = 0
        self._limits = np.asarray(model.values, dtype=np.int64)

    @property
    def best(self) -> Candidate:
        return Candidate(tuple(int(v) for v in self.best_values), self.best_fitness)

    @property
    def size(self) -> int:
        return len(self.population)


def init_population(model: SystemModel, size: int, rng: np.random.Generator,
                    store: TupleStore) -> SearchState:
    """Uniform random population, fitness-evaluated against the current store."""
    if size < 2:
        raise ValueError(f"population size must be at least 2, got {size}")
    population = np.empty((size, model.param_count), dtype=np.int64)
    for j, v in enumerate(model.values):
        population[:, j] = rng.integers(0, v, size=size)
    fitness = np.fromiter(
        (store.fitness(row) for row in population), dtype=np.int64, count=size
    )
    return SearchState(model, population, fitness, rng)


def clamp(value: float, v_i: int) -> int:
    """Round half-away-from-zero, then absorb out-of-range values at the opposite wall."""
    k = math.floor(value + 0.5) if value >= 0 else math.ceil(value - 0.5)
    if k > v_i - 1:
        return 0
    if k < 0:
        return v_i - 1
    return k


def _round_clamp(position: np.ndarray, limits: np.ndarray) -> np.ndarray:
    rounded = np.where(position >= 0, np.floor(position + 0.5),
                       np.ceil(position - 0.5)).astype(np.int64)
    top = limits - 1
    return np.where(rounded > top, 0, np.where(rounded < 0, top, rounded))


def teacher_update(values, teacher, mean, r: float, tf: int):
    """Raw teacher-phase position: X + r * (teacher - tf * mean), unrounded."""
    return np.asarray(values) + r * (np.asarray(teacher) - tf * np.asarray(mean))


def learner_update(values, peer, r: float, current_is_better: bool):
    """Raw learner-phase position: move along the advantage vector or toward the peer."""
    values = np.asarray(values)
    peer = np.asarray(peer)
    if current_is_better:
        return values + r * (values - peer)
    return values + r * (peer - values)


def _evaluate_move(state: SearchState, i: int, new_values: np.ndarray,
                   store: TupleStore) -> tuple[bool, int, int]:
    new_fitness = store.fitness(new_values)
    state.eval_count += 1
    old_fitness = int(state.fitness[i])
    accepted = new_fitness > old_fitness
    if accepted:
        state.population[i] = new_values
        state.fitness[i] = new_fitness
        if new_fitness > state.best_fitness:
            state.best_fitness = new_fitness
            state.best_values = new_values.copy()
    return accepted, old_fitness, new_fitness


def teacher_phase(state: SearchState, i: int, store: TupleStore) -> tuple[bool, int, int]:
    """Move member ``i`` toward the teacher, offset by the population mean.

    One scalar r per update; the teaching factor is 1 or 2 (u >= 0.5 rounds up).
    Returns (accepted, old_fitness, new_fitness).
    """
    mean = state.population.mean(axis=0)
    r = state.rng.random()
    tf = 2 if state.rng.random() >= 0.5 else 1
    position = teacher_update(state.population[i], state.best_values, mean, r, tf)
    result = _evaluate_move(state, i, _round_clamp(position, state._limits), store)
    state.explore_count += 1
    return result


def learner_phase(state: SearchState, i: int, store: TupleStore) -> tuple[bool, int, int]:
    """Pairwise peer learning for member ``i`` against a random distinct peer."""
    n = state.size
    j = int(state.rng.integers(n - 1))
    if j >= i:
        j += 1
    r = state.rng.random()
    position = learner_update(
        state.population[i], state.population[j], r,
        current_is_better=int(state.fitness[i]) > int(state.fitness[j]),
    )
    result = _evaluate_move(state, i, _round_clamp(position, state._limits), store)
    state.exploit_count += 1
    return result


def tlbo_sweep(state: SearchState, store: TupleStore, trace=None) -> SearchState:
    """One full sweep: every member runs the teacher then the learner phase."""
    for i in range(state.size):
        accepted, old, new = teacher_phase(state, i, store)
        if trace is not None:
            _trace_row(trace, state, i, "teacher", None, accepted, old, new)
        accepted, old, new = learner_phase(state, i, store)
        if trace is not None:
            _trace_row(trace, state, i, "learner", None, accepted, old, new)
    state.sweep_index += 1
    return state


def atlbo_sweep(state: SearchState, store: TupleStore, engine,
                dm_literal: bool = False, trace=None) -> SearchState:
    """One adaptive sweep: the fuzzy engine picks exactly one phase per member.

    Signals use running values: population min/max fitness at the moment of
    the update, distance to the current best, and mean distance to the
    population.
    """
    for i in range(state.size):
        fitness = state.fitness
        qm = fuzzy.quality_measure(int(fitness[i]), int(fitness.min()), int(fitness.max()))
        im = fuzzy.intensification_measure(state.population[i], state.best_values)
        dm = fuzzy.diversification_measure(state.population[i], state.population,
                                           literal=dm_literal)
        selection = engine.selection(qm, im, dm)
        if fuzzy.select_phase(selection) == fuzzy.GLOBAL_SEARCH:
            accepted, old, new = teacher_phase(state, i, store)
            phase = "teacher"
        else:
            accepted, old, new = learner_phase(state, i, store)
            phase = "learner"
        if trace is not None:
            _trace_row(trace, state, i, phase, (qm, im, dm, selection), accepted, old, new)
    state.sweep_index += 1
    return state


TRACE_HEADER = "sweep,member,phase,qm,im,dm,selection,old_fit,new_fit,accepted\n"


def _trace_row(trace, state, i, phase, signals, accepted, old, new):
    if signals is None:
        sig = ",,,"
    else:
        sig = ",".join(f"{s:.4f}" for s in signals)
    trace.write(f"{state.sweep_index},{i},{phase},{sig},{old},{new},{int(accepted)}\n")
