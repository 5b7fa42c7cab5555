"""Simulator and analysis toolkit for diversity optimization on LOTZ_k."""

from .core import Fitness, ProblemParams, dominates, evaluate, h_of, leading_ones, trailing_zeros
from .diversity import (
    DiversitySnapshot,
    ImbalanceCounters,
    MeasureKind,
    apply_swap,
    compare_sorted,
    potential_phi,
    tie_break_accept,
    total_imbalance,
)
from .evolve import Population, RunConfig, RunRecord, mutate, run, run_reference, step
from .oracle import (
    OptimalDiversity,
    PopulationFill,
    PositionClassification,
    build_covering_population,
    brute_force_feasible_set,
    canonical_genome,
    classify_position,
    feasible_pairs,
    mu_max,
    optimal_diversity,
)

__version__ = "0.1.0"
