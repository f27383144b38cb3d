"""Covering-array test suite generation with TLBO and a fuzzy-adaptive variant."""

from .bench import Aggregate, Experiment, run_experiment
from .fuzzy import FuzzyEngine, select_phase
from .generator import (
    GeneratorConfig,
    RunRecord,
    TestSuite,
    explore_exploit_percentages,
    generate,
)
from .model import ModelError, SubConfig, SystemModel, exhaustive_count, parse_model
from .search import Candidate
from .tuples import TupleStore, build_store, verify_suite

__version__ = "0.1.0"

__all__ = [
    "Aggregate",
    "Candidate",
    "Experiment",
    "FuzzyEngine",
    "GeneratorConfig",
    "ModelError",
    "RunRecord",
    "SubConfig",
    "SystemModel",
    "TestSuite",
    "TupleStore",
    "build_store",
    "exhaustive_count",
    "explore_exploit_percentages",
    "generate",
    "parse_model",
    "run_experiment",
    "select_phase",
    "verify_suite",
    "__version__",
]
