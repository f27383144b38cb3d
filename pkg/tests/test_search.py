"""Optimizer kernel tests: update algebra, clamping, sweeps, phase routing."""

import numpy as np
import pytest
from hypothesis import given, strategies as st

from caforge.fuzzy import FuzzyEngine
from caforge.model import parse_model
from caforge.search import (
    SearchState,
    atlbo_sweep,
    clamp,
    init_population,
    learner_phase,
    learner_update,
    teacher_phase,
    teacher_update,
    tlbo_sweep,
    _round_clamp,
)
from caforge.tuples import build_store


class FakeRng:
    """Scripted random stream for exact phase-arithmetic tests."""

    def __init__(self, randoms=(), ints=()):
        self.randoms = list(randoms)
        self.ints = list(ints)

    def random(self):
        return self.randoms.pop(0)

    def integers(self, *args, **kwargs):
        return self.ints.pop(0)


class ConstantSelection:
    """Fuzzy-engine stub with a fixed crisp output."""

    def __init__(self, value):
        self.value = value

    def selection(self, qm, im, dm):
        return self.value


def make_state(model, store, rows, rng=None):
    population = np.asarray(rows, dtype=np.int64)
    fitness = np.fromiter((store.fitness(r) for r in population),
                          dtype=np.int64, count=len(population))
    return SearchState(model, population, fitness,
                       rng if rng is not None else np.random.default_rng(0))


class TestClamp:
    def test_above_range_absorbs_to_low_end(self):
        assert clamp(4.2, 4) == 0

    def test_below_range_absorbs_to_high_end(self):
        assert clamp(-0.6, 4) == 3

    def test_in_range_rounds(self):
        assert clamp(2.4, 4) == 2

    def test_half_rounds_away_from_zero(self):
        assert clamp(2.5, 4) == 3
        assert clamp(-0.5, 4) == 3  # rounds to -1, absorbs to the top
        assert clamp(3.5, 4) == 0   # rounds to 4, absorbs to the bottom

    @given(st.floats(-20, 20), st.integers(2, 9))
    def test_vector_clamp_matches_scalar(self, value, v):
        vec = _round_clamp(np.array([value]), np.array([v]))
        assert int(vec[0]) == clamp(value, v)

    @given(st.floats(-50, 50), st.integers(2, 9))
    def test_result_always_in_range(self, value, v):
        assert 0 <= clamp(value, v) < v


class TestUpdateAlgebra:
    def test_teacher_substitution(self):
        # D=1: 2 + 1*(4 - 1*3) = 3
        assert teacher_update([2.0], [4.0], [3.0], r=1.0, tf=1)[0] == 3.0

    def test_teacher_clone_population_tf1_is_identity(self):
        x = np.array([1.0, 2.0, 0.0])
        out = teacher_update(x, x, x, r=0.7, tf=1)
        assert np.array_equal(out, x)

    def test_teacher_r_zero_is_identity(self):
        out = teacher_update([1.0, 2.0], [0.0, 0.0], [2.0, 2.0], r=0.0, tf=2)
        assert np.array_equal(out, [1.0, 2.0])

    def test_learner_worse_moves_toward_peer(self):
        # D=1 worse learner: 1 + 1*(3 - 1) = 3
        assert learner_update([1.0], [3.0], r=1.0, current_is_better=False)[0] == 3.0

    def test_learner_better_moves_along_advantage(self):
        assert learner_update([3.0], [1.0], r=0.5, current_is_better=True)[0] == 4.0

    def test_learner_equal_vectors_identity_both_branches(self):
        x = np.array([2.0, 1.0])
        assert np.array_equal(learner_update(x, x, 0.9, True), x)
        assert np.array_equal(learner_update(x, x, 0.9, False), x)

    def test_learner_r_zero_identity(self):
        assert learner_update([1.0], [3.0], r=0.0, current_is_better=False)[0] == 1.0


class TestInitPopulation:
    def test_fresh_store_every_fitness_equals_group_count(self):
        model = parse_model("3^4", 2)
        store = build_store(model)
        state = init_population(model, 40, np.random.default_rng(7), store)
        assert (state.fitness == 6).all()
        assert state.eval_count == 40

    def test_same_seed_same_population(self):
        model = parse_model("2^3 3^2", 2)
        store = build_store(model)
        a = init_population(model, 10, np.random.default_rng(3), store)
        b = init_population(model, 10, np.random.default_rng(3), store)
        assert np.array_equal(a.population, b.population)

    def test_size_below_two_rejected(self):
        model = parse_model("3^4", 2)
        with pytest.raises(ValueError, match="at least 2"):
            init_population(model, 1, np.random.default_rng(0), build_store(model))

    def test_best_tie_breaks_to_lowest_index(self):
        model = parse_model("3^2", 2)
        store = build_store(model)
        state = make_state(model, store, [[1, 2], [0, 0], [2, 1]])
        assert (state.fitness == 1).all()
        assert tuple(state.best_values) == (1, 2)


class TestTeacherPhase:
    def test_scripted_improvement(self):
        model = parse_model("3^2", 2)
        store = build_store(model)
        store.remove_covered([0, 0])
        state = make_state(model, store, [[0, 0], [1, 1]],
                           rng=FakeRng(randoms=[1.0, 0.0]))  # r=1, tf=1
        assert list(state.fitness) == [0, 1]
        accepted, old, new = teacher_phase(state, 0, store)
        # mean (0.5, 0.5); 0 + 1*(1 - 0.5) = 0.5 rounds to 1
        assert accepted and (old, new) == (0, 1)
        assert state.population[0].tolist() == [1, 1]
        assert state.explore_count == 1 and state.eval_count == 3

    def test_rejected_when_not_strictly_better(self):
        model = parse_model("3^2", 2)
        store = build_store(model)
        state = make_state(model, store, [[1, 1], [1, 1]],
                           rng=FakeRng(randoms=[0.9, 0.0]))  # clones, tf=1
        accepted, old, new = teacher_phase(state, 0, store)
        assert not accepted and old == new == 1
        assert state.population[0].tolist() == [1, 1]
        assert state.eval_count == 3  # evaluation still spent


class TestLearnerPhase:
    def test_scripted_move_toward_better_peer(self):
        model = parse_model("3^2", 2)
        store = build_store(model)
        store.remove_covered([0, 0])
        state = make_state(model, store, [[0, 0], [1, 1]],
                           rng=FakeRng(randoms=[1.0], ints=[0]))  # j -> 1, r=1
        accepted, old, new = learner_phase(state, 0, store)
        assert accepted and (old, new) == (0, 1)
        assert state.population[0].tolist() == [1, 1]
        assert state.exploit_count == 1

    def test_peer_never_equals_member(self):
        model = parse_model("3^4", 2)
        store = build_store(model)
        state = init_population(model, 6, np.random.default_rng(5), store)
        # the shifted draw j >= i -> j+1 keeps the peer distinct for any draw
        for draw in range(5):
            state.rng = FakeRng(randoms=[0.5], ints=[draw])
            learner_phase(state, 3, store)


class TestSweeps:
    def test_tlbo_eval_budget(self):
        model = parse_model("3^4", 2)
        store = build_store(model)
        state = init_population(model, 2, np.random.default_rng(0), store)
        tlbo_sweep(state, store)
        assert state.eval_count == 2 + 4

    def test_tlbo_eval_budget_population_40(self):
        model = parse_model("3^4", 2)
        store = build_store(model)
        state = init_population(model, 40, np.random.default_rng(0), store)
        tlbo_sweep(state, store)
        assert state.eval_count == 40 + 80

    def test_tlbo_phase_split_is_even(self):
        model = parse_model("2^3 3^2", 2)
        store = build_store(model)
        state = init_population(model, 8, np.random.default_rng(1), store)
        for _ in range(5):
            tlbo_sweep(state, store)
        assert state.explore_count == state.exploit_count == 40

    def test_atlbo_eval_budget(self):
        model = parse_model("3^4", 2)
        store = build_store(model)
        store.remove_covered([0, 0, 0, 0])
        state = init_population(model, 40, np.random.default_rng(0), store)
        engine = FuzzyEngine()
        for _ in range(3):
            atlbo_sweep(state, store, engine)
        assert state.eval_count == 40 + 3 * 40
        assert state.explore_count + state.exploit_count == 3 * 40

    def test_best_fitness_never_decreases(self):
        model = parse_model("2^3 3^2", 2)
        store = build_store(model)
        store.remove_covered([0, 0, 0, 0, 0])
        store.remove_covered([1, 1, 1, 1, 1])
        state = init_population(model, 10, np.random.default_rng(2), store)
        engine = FuzzyEngine()
        best_seen = state.best_fitness
        for _ in range(20):
            atlbo_sweep(state, store, engine)
            assert state.best_fitness >= best_seen
            best_seen = state.best_fitness

    def test_population_stays_in_range(self):
        model = parse_model("2 5 3 4", 2)
        store = build_store(model)
        store.remove_covered([0, 0, 0, 0])
        state = init_population(model, 12, np.random.default_rng(9), store)
        engine = FuzzyEngine()
        limits = np.asarray(model.values)
        for _ in range(15):
            atlbo_sweep(state, store, engine)
            tlbo_sweep(state, store)
            assert (state.population >= 0).all()
            assert (state.population < limits).all()

    def test_determinism(self):
        model = parse_model("2^3 3^2", 2)

        def run():
            store = build_store(model)
            store.remove_covered([0, 1, 0, 2, 1])
            state = init_population(model, 10, np.random.default_rng(42), store)
            engine = FuzzyEngine()
            for _ in range(10):
                atlbo_sweep(state, store, engine)
            return state

        a, b = run(), run()
        assert np.array_equal(a.population, b.population)
        assert a.best == b.best
        assert (a.eval_count, a.explore_count, a.exploit_count) == \
               (b.eval_count, b.explore_count, b.exploit_count)


class TestPhaseRouting:
    def test_constant_global_stub_never_exploits(self):
        model = parse_model("3^4", 2)
        store = build_store(model)
        state = init_population(model, 10, np.random.default_rng(0), store)
        for _ in range(5):
            atlbo_sweep(state, store, ConstantSelection(100.0))
        assert state.exploit_count == 0
        assert state.explore_count == 50

    def test_constant_local_stub_never_explores(self):
        model = parse_model("3^4", 2)
        store = build_store(model)
        state = init_population(model, 10, np.random.default_rng(0), store)
        for _ in range(5):
            atlbo_sweep(state, store, ConstantSelection(0.0))
        assert state.explore_count == 0
        assert state.exploit_count == 50

    def test_boundary_selection_routes_local(self):
        model = parse_model("3^4", 2)
        store = build_store(model)
        state = init_population(model, 4, np.random.default_rng(0), store)
        atlbo_sweep(state, store, ConstantSelection(50.0))
        assert state.explore_count == 0


class TestBudgetParity:
    def test_tlbo_half_iterations_equals_atlbo_budget(self):
        model = parse_model("3^4", 2)

        def evals(algo, sweeps):
            store = build_store(model)
            state = init_population(model, 40, np.random.default_rng(0), store)
            engine = FuzzyEngine()
            for _ in range(sweeps):
                if algo == "atlbo":
                    atlbo_sweep(state, store, engine)
                else:
                    tlbo_sweep(state, store)
            return state.eval_count

        assert evals("atlbo", 10) == evals("tlbo", 5) == 40 + 400
