"""Evolutionary loop semantics, engine equivalence, run records."""
import math

import numpy as np
import pytest
from scipy import stats

from lotzkit import kernel
from lotzkit.core import ProblemParams, evaluate, genome_from_string
from lotzkit.diversity import MeasureKind
from lotzkit.evolve import (
    Population,
    RunConfig,
    RunRecord,
    mutate,
    random_genome,
    run,
    run_fast_state,
    run_reference,
    step,
)
from lotzkit.oracle import PopulationFill, build_covering_population, optimal_diversity
from lotzkit.rng import Xoshiro256, derive_seed


class ScriptedRng:
    """Fixed draw sequences, for forcing specific offspring in step tests."""

    def __init__(self, below=(), doubles=()):
        self.below = list(below)
        self.doubles = list(doubles)

    def next_below(self, bound):
        value = self.below.pop(0)
        assert 0 <= value < bound
        return value

    def next_double(self):
        return self.doubles.pop(0)


FLIP = 0.0
KEEP = 1.0


def test_mutation_mean_flip_count():
    n, reps = 64, 1_000_000
    counts, _ = kernel.mutation_flip_stats(np.uint64(11), n, reps)
    assert abs(counts.mean() - 1.0) < 0.01


def test_mutation_identity_probability():
    n, reps = 64, 1_000_000
    counts, _ = kernel.mutation_flip_stats(np.uint64(12), n, reps)
    p_identity = (1 - 1 / n) ** n
    observed = np.mean(counts == 0)
    sigma = math.sqrt(p_identity * (1 - p_identity) / reps)
    assert abs(observed - p_identity) < 3 * sigma


def test_mutation_positions_uniform():
    n, reps = 64, 200_000
    _, per_pos = kernel.mutation_flip_stats(np.uint64(13), n, reps)
    chi2, p_value = stats.chisquare(per_pos)
    assert p_value > 0.001


def test_reference_mutate_matches_kernel_flip_rule():
    parent = np.zeros(32, dtype=np.uint8)
    rng = Xoshiro256(77)
    children = [mutate(parent, rng) for _ in range(500)]
    counts, _ = kernel.mutation_flip_stats(np.uint64(77), 32, 500)
    assert [int(c.sum()) for c in children] == [int(c) for c in counts]


def test_mutate_leaves_parent_untouched():
    parent = genome_from_string("10101010")
    copy = parent.copy()
    mutate(parent, Xoshiro256(5))
    assert np.array_equal(parent, copy)


def make_population(params, texts):
    return Population.from_genomes(params, [genome_from_string(t) for t in texts])


def test_step_rejects_dominated_offspring():
    p = ProblemParams(6, 2)
    pop = make_population(p, ["111000"])  # (3,3), feasible
    cfg = RunConfig(params=p, measure=MeasureKind.TOTAL_IMBALANCE, seed=0)
    # parent 111000 -> flip position 3 -> 110000: (2,4)? no: 110000 has lo=2,
    # tz=4, sum=6=n: actually feasible. Flip position 6 instead -> 111001:
    # lo=3, tz=0, sum=3 < 4: infeasible and dominated by (3,3).
    rng = ScriptedRng(below=[0], doubles=[KEEP, KEEP, KEEP, KEEP, KEEP, FLIP])
    assert not step(pop, cfg, rng)
    assert list(pop.members) == [(3, 3)]
    pop.check_invariants()


def test_step_identity_offspring_accepted():
    p = ProblemParams(6, 2)
    pop = make_population(p, ["111000"])
    cfg = RunConfig(params=p, measure=MeasureKind.SORTED_VECTOR, seed=0)
    rng = ScriptedRng(below=[0], doubles=[KEEP] * 6)
    assert step(pop, cfg, rng)
    assert list(pop.members) == [(3, 3)]
    assert pop.total_imbalance() == 6
    pop.check_invariants()


def test_step_inserts_new_fitness_and_evicts_dominated():
    p = ProblemParams(6, 2)
    pop = make_population(p, ["001100", "100110"])  # (0,2), (1,1): infeasible staircase
    cfg = RunConfig(params=p, measure=MeasureKind.TOTAL_IMBALANCE, seed=0)
    # parent 001100 mutated to 110100: fitness (2,2), feasible, dominating
    # both infeasible members -> archive collapses to the offspring
    rng = ScriptedRng(below=[0], doubles=[FLIP, FLIP, FLIP, KEEP, KEEP, KEEP])
    assert step(pop, cfg, rng)
    assert list(pop.members) == [(2, 2)]
    assert pop.covered_feasible == 1
    pop.check_invariants()


def test_step_partial_eviction_keeps_canonical_order():
    p = ProblemParams(6, 2)
    pop = make_population(p, ["001100", "100110"])  # (0,2), (1,1)
    cfg = RunConfig(params=p, measure=MeasureKind.TOTAL_IMBALANCE, seed=0)
    # parent 001100 mutated to 010000: fitness (0,4), feasible; it dominates
    # (0,2) but not (1,1); the survivor swaps into the freed slot
    rng = ScriptedRng(below=[0], doubles=[KEEP, FLIP, FLIP, FLIP, KEEP, KEEP])
    assert step(pop, cfg, rng)
    assert list(pop.members) == [(1, 1), (0, 4)]
    assert pop.covered_feasible == 1
    pop.check_invariants()


def test_step_tie_break_respects_measure():
    p = ProblemParams(6, 6)
    # members 110100 (2,2) and 100010 (1,1): n1=(2,1,0,1,1,0), b=(2,0,2,0,0,2)=6
    # improving move: replace 100010 by 101010 -> n1=(2,1,1,1,1,0),
    # b=(2,0,0,0,0,2)=4 < 6 -> accepted
    pop = make_population(p, ["110100", "100010"])
    cfg = RunConfig(params=p, measure=MeasureKind.TOTAL_IMBALANCE, seed=0)
    rng = ScriptedRng(below=[1], doubles=[KEEP, KEEP, FLIP, KEEP, KEEP, KEEP])
    assert step(pop, cfg, rng)
    assert np.array_equal(pop.archive[(1, 1)], genome_from_string("101010"))

    # the same move under the sorted measure: (2,2,0,0,0,0) < (2,2,2,0,0,0)
    pop = make_population(p, ["110100", "100010"])
    cfg = RunConfig(params=p, measure=MeasureKind.SORTED_VECTOR, seed=0)
    rng = ScriptedRng(below=[1], doubles=[KEEP, KEEP, FLIP, KEEP, KEEP, KEEP])
    assert step(pop, cfg, rng)
    assert np.array_equal(pop.archive[(1, 1)], genome_from_string("101010"))

    # worsening move: replace 100010 by 100110 -> n1=(2,1,0,2,1,0),
    # b=(2,0,2,2,0,2)=8 > 6 -> rejected under total imbalance
    pop = make_population(p, ["110100", "100010"])
    cfg = RunConfig(params=p, measure=MeasureKind.TOTAL_IMBALANCE, seed=0)
    rng = ScriptedRng(below=[1], doubles=[KEEP, KEEP, KEEP, FLIP, KEEP, KEEP])
    assert not step(pop, cfg, rng)
    assert np.array_equal(pop.archive[(1, 1)], genome_from_string("100010"))

    # ... and rejected under the sorted measure: (2,2,2,2,0,0) > (2,2,2,0,0,0)
    pop = make_population(p, ["110100", "100010"])
    cfg = RunConfig(params=p, measure=MeasureKind.SORTED_VECTOR, seed=0)
    rng = ScriptedRng(below=[1], doubles=[KEEP, KEEP, KEEP, FLIP, KEEP, KEEP])
    assert not step(pop, cfg, rng)

    # under NO_DIVERSITY the same worsening move is accepted
    pop = make_population(p, ["110100", "100010"])
    cfg = RunConfig(params=p, measure=MeasureKind.NO_DIVERSITY, seed=0)
    rng = ScriptedRng(below=[1], doubles=[KEEP, KEEP, KEEP, FLIP, KEEP, KEEP])
    assert step(pop, cfg, rng)
    assert np.array_equal(pop.archive[(1, 1)], genome_from_string("100110"))


def state_of(pop: Population):
    return (
        list(pop.members),
        {k: pop.archive[k].tobytes() for k in pop.members},
        pop.counters.n1.tolist(),
        pop.covered_feasible,
        pop.total_imbalance(),
    )


ENGINE_CONFIGS = [
    (8, 2, MeasureKind.TOTAL_IMBALANCE, "optimum", None, 5),
    (8, 4, MeasureKind.SORTED_VECTOR, "optimum", None, 17),
    (10, 3, MeasureKind.NO_DIVERSITY, "cover", None, 99),
    (9, 9, MeasureKind.SORTED_VECTOR, "optimum", None, 4),
    (12, 6, MeasureKind.SORTED_VECTOR, "optimum", PopulationFill.WORST_DIVERSITY, 3),
    (7, 4, MeasureKind.TOTAL_IMBALANCE, "optimum", PopulationFill.RANDOM, 21),
]


@pytest.mark.parametrize("n,k,measure,stop_at,fill,seed", ENGINE_CONFIGS)
def test_engines_agree_step_for_step(n, k, measure, stop_at, fill, seed):
    params = ProblemParams(n, k)
    init = None
    init_kind = "random"
    if fill is not None:
        init = build_covering_population(params, fill, seed=1)
        init_kind = "given"
    for cap in (1, 2, 3, 5, 8, 13, 21, 34, 55, 89, 200, 600):
        cfg = RunConfig(
            params=params, measure=measure, seed=seed, max_iters=cap, init=init_kind, stop_at=stop_at
        )
        ref_record, pop = run_reference(cfg, init)
        fast_record, state = run_fast_state(cfg, init)
        assert ref_record == fast_record
        members, genomes, n1, covered, total = state_of(pop)
        assert members == state["members"]
        assert covered == state["covered"]
        assert total == state["total_imbalance"]
        assert n1 == state["n1"].tolist()
        for key in members:
            assert genomes[key] == state["genomes"][key].tobytes()


def test_run_is_deterministic():
    cfg = RunConfig(params=ProblemParams(16, 4), measure=MeasureKind.TOTAL_IMBALANCE, seed=1234)
    assert run(cfg) == run(cfg)


def test_run_from_best_population_is_already_optimal():
    p = ProblemParams(16, 4)
    init = build_covering_population(p, PopulationFill.BEST_DIVERSITY)
    cfg = RunConfig(params=p, measure=MeasureKind.SORTED_VECTOR, seed=5, init="given")
    record = run(cfg, init)
    assert record == RunRecord(0, 0, optimal_diversity(p).opt_total, 0, False)


def test_run_from_worst_population_k2_is_already_optimal():
    p = ProblemParams(16, 2)
    init = build_covering_population(p, PopulationFill.WORST_DIVERSITY)
    cfg = RunConfig(params=p, measure=MeasureKind.TOTAL_IMBALANCE, seed=5, init="given")
    record = run(cfg, init)
    assert record.iters_to_cover == 0 and record.iters_to_opt == 0


def test_capped_run_reports_partial_record():
    cfg = RunConfig(
        params=ProblemParams(16, 4), measure=MeasureKind.TOTAL_IMBALANCE, seed=3, max_iters=5
    )
    record = run(cfg)
    assert record.capped
    assert record.iters_to_cover is None and record.iters_to_opt is None
    assert record.final_phi is None


def test_gsemo_stops_at_cover_and_keeps_cover():
    cfg = RunConfig(
        params=ProblemParams(12, 4), measure=MeasureKind.NO_DIVERSITY, seed=8, stop_at="cover"
    )
    record, state = run_fast_state(cfg)
    assert not record.capped
    assert record.iters_to_cover is not None
    assert state["covered"] == optimal_diversity(ProblemParams(12, 4)).mu_max


def test_worst_start_matches_published_scale():
    # smoke version of the worst-start study: n=16, k=4 normalized mean
    # sits near 1.0 (full 128-run version lives in the acceptance suite)
    p = ProblemParams(16, 4)
    init = build_covering_population(p, PopulationFill.WORST_DIVERSITY)
    norm = p.k * p.n**2 * math.log(p.n)
    values = []
    for r in range(24):
        cfg = RunConfig(
            params=p,
            measure=MeasureKind.TOTAL_IMBALANCE,
            seed=derive_seed(42, 5, 1, p.n, p.k, r),
            init="given",
        )
        values.append(run(cfg, init).iters_to_opt / norm)
    assert 0.5 < np.mean(values) < 1.7


def test_reference_run_invariants_small():
    # cover never shrinks, sizes respect the archive bounds, archive stays
    # mutually non-dominating
    p = ProblemParams(10, 3)
    cfg = RunConfig(params=p, measure=MeasureKind.TOTAL_IMBALANCE, seed=31)
    rng = Xoshiro256(cfg.seed)
    pop = Population.from_genomes(p, [random_genome(p.n, rng)])
    front = pop.front_size
    seen_feasible = pop.covered_feasible > 0
    covered_prev = pop.covered_feasible
    for t in range(4000):
        step(pop, cfg, rng)
        assert pop.covered_feasible >= covered_prev
        covered_prev = pop.covered_feasible
        seen_feasible = seen_feasible or pop.covered_feasible > 0
        if seen_feasible:
            assert pop.size <= front
        else:
            max_sum = max(lo + tz for lo, tz in pop.members)
            assert pop.size <= max_sum + 1 <= p.n - p.k
        if t % 500 == 0:
            pop.check_invariants()
    assert pop.covered_feasible == front
