"""The GSEMO / GSEMO_D evolutionary loop.

One iteration picks a parent uniformly from the archive, flips each bit with
probability 1/n, and then either (a) competes against the archive member of
equal fitness via the diversity tie-break, or (b) enters the archive if no
member dominates it, evicting every member it dominates.  The archive keeps
one genome per fitness vector.

Two engines execute the loop: `run` drives the compiled kernel (the default,
used by the experiment harness), and `run_reference` is a plain-Python
implementation of the same semantics, drawing from the identical RNG stream.
Both produce bit-identical results; tests cross-validate them step by step.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from . import kernel, oracle
from .core import Fitness, ProblemParams, dominates, evaluate, h_of
from .diversity import (
    DiversitySnapshot,
    ImbalanceCounters,
    MeasureKind,
    apply_swap,
    tie_break_accept,
    total_imbalance,
)
from .rng import Xoshiro256


@dataclass
class RunConfig:
    """Parameters of a single trial."""

    params: ProblemParams
    measure: MeasureKind
    seed: int
    max_iters: int | None = None
    init: str = "random"  # "random" (one uniform genome) or "given"
    stop_at: str = "optimum"  # "optimum" or "cover"

    def __post_init__(self):
        if self.init not in ("random", "given"):
            raise ValueError(f"init must be 'random' or 'given', got {self.init!r}")
        if self.stop_at not in ("optimum", "cover"):
            raise ValueError(f"stop_at must be 'optimum' or 'cover', got {self.stop_at!r}")
        if self.max_iters is not None and self.max_iters <= 0:
            raise ValueError("max_iters must be positive")

    @property
    def effective_max_iters(self) -> int:
        if self.max_iters is not None:
            return self.max_iters
        n, k = self.params.n, self.params.k
        return 100 * k * n**3


@dataclass(frozen=True)
class RunRecord:
    """Milestones measured over one trial.

    Iteration counts are indices of the step at which the milestone first
    held (0 when the initial population already satisfies it), or None when
    the run was capped first.
    """

    iters_to_cover: int | None
    iters_to_opt: int | None
    imbalance_at_cover: int | None
    final_phi: int | None
    capped: bool


def mutate(parent: np.ndarray, rng: Xoshiro256) -> np.ndarray:
    """Standard bit mutation: each bit flips independently with prob 1/n."""
    n = len(parent)
    inv_n = 1.0 / n
    child = parent.copy()
    for i in range(n):
        if rng.next_double() < inv_n:
            child[i] ^= 1
    return child


def random_genome(n: int, rng: Xoshiro256) -> np.ndarray:
    """Uniform random bit string, drawn bit by bit."""
    return np.array([1 if rng.next_double() < 0.5 else 0 for _ in range(n)], dtype=np.uint8)


class Population:
    """Pareto archive with one genome per fitness vector.

    `members` lists the archive keys in a canonical order (insertions
    append; evictions swap the last member into the hole), which gives O(1)
    uniform parent sampling and keeps the compiled engine's ordering
    reproducible in this reference implementation.
    """

    def __init__(self, params: ProblemParams):
        self.params = params
        self.archive: dict[tuple[int, int], np.ndarray] = {}
        self.members: list[tuple[int, int]] = []
        self._pos: dict[tuple[int, int], int] = {}
        self._fits: dict[tuple[int, int], Fitness] = {}
        self.counters = ImbalanceCounters(params.n)
        self.covered_feasible = 0
        self.front_size = oracle.mu_max(params)

    @classmethod
    def from_genomes(cls, params: ProblemParams, genomes) -> "Population":
        pop = cls(params)
        for bits in genomes:
            fit = evaluate(bits, params)
            if fit.key in pop.archive:
                raise ValueError(f"duplicate fitness vector {fit.key} in initial population")
            pop._insert(fit, np.asarray(bits, dtype=np.uint8).copy())
        return pop

    @property
    def size(self) -> int:
        return len(self.members)

    @property
    def is_covered(self) -> bool:
        return self.covered_feasible == self.front_size

    def fitness_of(self, key: tuple[int, int]) -> Fitness:
        fit = self._fits.get(key)
        if fit is None:
            lo, tz = key
            fit = Fitness(lo, tz, h_of(lo + tz, self.params))
        return fit

    def sample_parent_key(self, rng: Xoshiro256) -> tuple[int, int]:
        return self.members[rng.next_below(len(self.members))]

    def total_imbalance(self) -> int:
        return total_imbalance(self.counters)

    def _insert(self, fit: Fitness, bits: np.ndarray) -> None:
        key = fit.key
        self.archive[key] = bits
        self._pos[key] = len(self.members)
        self._fits[key] = fit
        self.members.append(key)
        self.counters.add(bits)
        if fit.is_feasible(self.params):
            self.covered_feasible += 1

    def _remove_positions(self, positions: list[int]) -> None:
        # Descending order keeps pending positions valid across swap-removals.
        for pos in sorted(positions, reverse=True):
            key = self.members[pos]
            self.counters.remove(self.archive.pop(key))
            del self._pos[key]
            del self._fits[key]
            last = self.members.pop()
            if pos < len(self.members):
                self.members[pos] = last
                self._pos[last] = pos

    def check_invariants(self) -> None:
        """Exhaustive consistency check; meant for tests and debugging."""
        fits = [self.fitness_of(k) for k in self.members]
        for i, fa in enumerate(fits):
            for j, fb in enumerate(fits):
                if i != j and dominates(fa, fb):
                    raise AssertionError(f"archive member {fa} dominates {fb}")
        recount = ImbalanceCounters.from_genomes([self.archive[k] for k in self.members])
        if recount.pop_size != self.counters.pop_size or not np.array_equal(
            recount.n1, self.counters.n1
        ):
            raise AssertionError("incremental counters diverged from recount")
        floor = self.params.feasible_floor
        covered = sum(1 for (lo, tz) in self.members if lo + tz >= floor)
        if covered != self.covered_feasible:
            raise AssertionError("covered_feasible count diverged")


def step(pop: Population, cfg: RunConfig, rng: Xoshiro256) -> bool:
    """One GSEMO_D iteration; returns True when the offspring was accepted."""
    parent = pop.archive[pop.sample_parent_key(rng)]
    child = mutate(parent, rng)
    fit = evaluate(child, pop.params)
    key = fit.key

    if key in pop.archive:
        incumbent = pop.archive[key]
        if cfg.measure is MeasureKind.NO_DIVERSITY:
            apply_swap(pop.counters, incumbent, child)
            pop.archive[key] = child
            return True
        before = DiversitySnapshot.from_counters(pop.counters)
        trial = apply_swap(pop.counters.copy(), incumbent, child)
        after = DiversitySnapshot.from_counters(trial)
        if tie_break_accept(cfg.measure, before, after):
            pop.counters = trial
            pop.archive[key] = child
            return True
        return False

    for member_key in pop.members:
        if dominates(pop.fitness_of(member_key), fit):
            return False
    doomed = [
        pos
        for pos, member_key in enumerate(pop.members)
        if dominates(fit, pop.fitness_of(member_key))
    ]
    pop._remove_positions(doomed)
    pop._insert(fit, child)
    return True


def run(cfg: RunConfig, initial_genomes=None) -> RunRecord:
    """Execute one trial on the compiled kernel."""
    record, _ = run_fast_state(cfg, initial_genomes)
    return record


def run_fast_state(cfg: RunConfig, initial_genomes=None):
    """Kernel run returning (RunRecord, final-state dict) for inspection."""
    params = cfg.params
    _check_init(cfg, initial_genomes)
    target = oracle.optimal_diversity(params)
    if initial_genomes is None:
        init = np.empty((0, params.n), dtype=np.uint8)
    else:
        init = np.array([np.asarray(g, dtype=np.uint8) for g in initial_genomes], dtype=np.uint8)
        init = init.reshape(len(initial_genomes), params.n)
    out = kernel.run_kernel(
        params.n,
        params.k,
        _MEASURE_CODE[cfg.measure],
        0 if cfg.stop_at == "optimum" else 1,
        np.uint64(cfg.seed & 0xFFFFFFFFFFFFFFFF),
        cfg.effective_max_iters,
        init,
        target.mu_max,
        target.opt_total,
    )
    (cover, opt, imb_at_cover, capped, mu, covered, total, members, geno, n1) = out
    record = RunRecord(
        iters_to_cover=None if cover < 0 else int(cover),
        iters_to_opt=None if opt < 0 else int(opt),
        imbalance_at_cover=None if imb_at_cover < 0 else int(imb_at_cover),
        final_phi=int(total - target.opt_total) if covered == target.mu_max else None,
        capped=bool(capped),
    )
    n = params.n
    keys = [(int(k) // (n + 1), int(k) % (n + 1)) for k in members[:mu]]
    state = {
        "members": keys,
        "genomes": {key: geno[key[0] * (n + 1) + key[1]].copy() for key in keys},
        "n1": n1.copy(),
        "covered": int(covered),
        "total_imbalance": int(total),
    }
    return record, state


def run_reference(cfg: RunConfig, initial_genomes=None):
    """Pure-Python trial with semantics identical to the kernel.

    Returns (RunRecord, Population).  Used for cross-validation and for
    instrumented property tests; prefer `run` for anything performance
    sensitive.
    """
    params = cfg.params
    _check_init(cfg, initial_genomes)
    target = oracle.optimal_diversity(params)
    rng = Xoshiro256(cfg.seed)
    if initial_genomes is None:
        pop = Population.from_genomes(params, [random_genome(params.n, rng)])
    else:
        pop = Population.from_genomes(params, initial_genomes)

    iters_to_cover = iters_to_opt = imbalance_at_cover = None
    t = 0

    def note_milestones():
        nonlocal iters_to_cover, iters_to_opt, imbalance_at_cover
        if iters_to_cover is None and pop.is_covered:
            iters_to_cover = t
            imbalance_at_cover = pop.total_imbalance()
        if iters_to_cover is not None and iters_to_opt is None:
            if pop.total_imbalance() == target.opt_total:
                iters_to_opt = t

    def done() -> bool:
        if cfg.stop_at == "cover":
            return iters_to_cover is not None
        return iters_to_opt is not None

    note_milestones()
    max_iters = cfg.effective_max_iters
    while not done() and t < max_iters:
        t += 1
        step(pop, cfg, rng)
        note_milestones()

    record = RunRecord(
        iters_to_cover=iters_to_cover,
        iters_to_opt=iters_to_opt,
        imbalance_at_cover=imbalance_at_cover,
        final_phi=pop.total_imbalance() - target.opt_total if pop.is_covered else None,
        capped=not done(),
    )
    return record, pop


_MEASURE_CODE = {
    MeasureKind.NO_DIVERSITY: 0,
    MeasureKind.TOTAL_IMBALANCE: 1,
    MeasureKind.SORTED_VECTOR: 2,
}


def _check_init(cfg: RunConfig, initial_genomes) -> None:
    if cfg.init == "given" and initial_genomes is None:
        raise ValueError("init='given' requires initial genomes")
    if cfg.init == "random" and initial_genomes is not None:
        raise ValueError("initial genomes passed but init='random'")
