"""Batch experiment protocols and their normalized statistics.

Three protocols are provided:

* full-run times (`experiment_full_run`): random start, run until the
  diversity is optimal; iterations to front coverage and to optimal
  diversity, both normalized by k * n^3;
* cover diversity (`experiment_cover_diversity`): random start, run until
  the front is covered, for the plain GSEMO and both GSEMO_D variants;
  statistic is imbalance-at-cover / optimal-imbalance - 1;
* worst start (`experiment_worst_start`): start from the covering
  population with maximal imbalance everywhere and run until the diversity
  is optimal; iterations normalized by k * n^2 * ln(n).

Every run's seed derives from the base seed and the (experiment, measure,
n, k, run index) labels, so per-run rows are reproducible bit for bit no
matter how cells are scheduled.
"""
from __future__ import annotations

import math
import sys
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass

from .core import ProblemParams
from .diversity import MeasureKind
from .evolve import RunConfig, run
from .oracle import PopulationFill, build_covering_population, optimal_diversity
from .rng import derive_seed

PAPER_N_VALUES = (8, 16, 32, 64, 128)
SMALL_N_VALUES = (8, 16, 32, 64)

# k rules of the experiment grid; at n = 128 only the first three apply
K_RULES = ("2", "4", "sqrt", "half", "n")
FULL_RULE_N_LIMIT = 64

RUNS_HEADER = (
    "experiment,algorithm,measure,n,k,run_index,seed,iters_to_cover,"
    "iters_to_opt,imbalance_at_cover,opt_total,mu_max,capped"
)
SUMMARY_HEADER = "experiment,algorithm,measure,n,k,statistic,mean,std,runs,capped"

_EXPERIMENT_CODE = {"fig3": 3, "fig4": 4, "fig5": 5}
_MEASURE_SEED_CODE = {"none": 0, "total": 1, "sorted": 2}


def rule_k(rule: str, n: int) -> int:
    if rule == "2":
        return 2
    if rule == "4":
        return 4
    if rule == "sqrt":
        return math.isqrt(n)
    if rule == "half":
        return n // 2
    if rule == "n":
        return n
    raise ValueError(f"unknown k rule {rule!r}")


def grid_cells(n_values, include_k2: bool = True) -> list[tuple[int, int]]:
    """(n, k) cells with per-n deduplicated k values, in deterministic order."""
    cells = []
    for n in n_values:
        rules = K_RULES if n <= FULL_RULE_N_LIMIT else ("2", "4", "sqrt")
        ks = sorted({rule_k(r, n) for r in rules})
        for k in ks:
            if k < 2 or k > n:
                continue
            if k == 2 and not include_k2:
                continue
            cells.append((n, k))
    return cells


@dataclass(frozen=True)
class GridSpec:
    """Experiment grid: problem sizes, trials per cell, and the base seed."""

    n_values: tuple = PAPER_N_VALUES
    runs_per_cell: int = 128
    base_seed: int = 1

    @classmethod
    def preset(cls, scale: str, runs_per_cell: int = 128, base_seed: int = 1) -> "GridSpec":
        if scale == "paper":
            return cls(PAPER_N_VALUES, runs_per_cell, base_seed)
        if scale == "small":
            return cls(SMALL_N_VALUES, runs_per_cell, base_seed)
        raise ValueError(f"unknown scale {scale!r}; expected paper|small")


@dataclass(frozen=True)
class RunRow:
    """One trial, mirroring one line of runs.csv."""

    experiment: str
    algorithm: str
    measure: str
    n: int
    k: int
    run_index: int
    seed: int
    iters_to_cover: int | None
    iters_to_opt: int | None
    imbalance_at_cover: int | None
    opt_total: int
    mu_max: int
    capped: bool


@dataclass(frozen=True)
class CellSummary:
    """Aggregated statistic of one (experiment, algorithm, measure, n, k) cell."""

    experiment: str
    algorithm: str
    measure: str
    n: int
    k: int
    statistic: str
    mean: float
    std: float
    runs: int
    capped: int


def aggregate(values) -> tuple[float, float]:
    """Sample mean and sample standard deviation (denominator N - 1)."""
    vals = list(values)
    if not vals:
        raise ValueError("cannot aggregate an empty cell")
    mean = sum(vals) / len(vals)
    if len(vals) == 1:
        return mean, 0.0
    var = sum((v - mean) ** 2 for v in vals) / (len(vals) - 1)
    return mean, math.sqrt(var)


def _execute_run(task) -> RunRow:
    experiment, measure_text, n, k, run_index, seed, stop_at, init_kind = task
    params = ProblemParams(n, k)
    measure = MeasureKind.parse(measure_text)
    cfg = RunConfig(
        params=params,
        measure=measure,
        seed=seed,
        init="given" if init_kind == "worst" else "random",
        stop_at=stop_at,
    )
    if init_kind == "worst":
        record = run(cfg, build_covering_population(params, PopulationFill.WORST_DIVERSITY))
    else:
        record = run(cfg)
    target = optimal_diversity(params)
    return RunRow(
        experiment=experiment,
        algorithm="gsemo" if measure is MeasureKind.NO_DIVERSITY else "gsemo_d",
        measure=measure.value,
        n=n,
        k=k,
        run_index=run_index,
        seed=seed,
        iters_to_cover=record.iters_to_cover,
        iters_to_opt=record.iters_to_opt,
        imbalance_at_cover=record.imbalance_at_cover,
        opt_total=target.opt_total,
        mu_max=target.mu_max,
        capped=record.capped,
    )


def _run_tasks(tasks, jobs: int, progress) -> list[RunRow]:
    if jobs <= 1:
        rows = []
        for task in tasks:
            rows.append(_execute_run(task))
            if progress:
                progress(rows[-1])
        return rows
    with ProcessPoolExecutor(max_workers=jobs) as pool:
        rows = []
        for row in pool.map(_execute_run, tasks, chunksize=4):
            rows.append(row)
            if progress:
                progress(row)
    return rows


def _cell_tasks(experiment, measure_text, grid, cells, stop_at, init_kind):
    code = _EXPERIMENT_CODE[experiment]
    mcode = _MEASURE_SEED_CODE[measure_text]
    tasks = []
    for n, k in cells:
        for r in range(grid.runs_per_cell):
            seed = derive_seed(grid.base_seed, code, mcode, n, k, r)
            tasks.append((experiment, measure_text, n, k, r, seed, stop_at, init_kind))
    return tasks


def _summarize(experiment, rows, statistic, value_of) -> list[CellSummary]:
    cells: dict[tuple, list[RunRow]] = {}
    for row in rows:
        cells.setdefault((row.algorithm, row.measure, row.n, row.k), []).append(row)
    summaries = []
    for (algorithm, measure, n, k), cell_rows in cells.items():
        valid = [r for r in cell_rows if not r.capped]
        capped = len(cell_rows) - len(valid)
        if capped:
            print(
                f"warning: {capped} capped run(s) excluded from {experiment} "
                f"{algorithm}/{measure} n={n} k={k}",
                file=sys.stderr,
            )
        mean, std = aggregate(value_of(r) for r in valid)
        summaries.append(
            CellSummary(
                experiment=experiment,
                algorithm=algorithm,
                measure=measure,
                n=n,
                k=k,
                statistic=statistic,
                mean=mean,
                std=std,
                runs=len(valid),
                capped=capped,
            )
        )
    return summaries


def experiment_full_run(grid: GridSpec, measure: MeasureKind, jobs: int = 1, progress=None):
    """Random start, run to optimal diversity; times normalized by k*n^3."""
    if measure is MeasureKind.NO_DIVERSITY:
        raise ValueError("full-run experiment needs a diversity measure (total or sorted)")
    cells = grid_cells(grid.n_values)
    tasks = _cell_tasks("fig3", measure.value, grid, cells, "optimum", "random")
    rows = _run_tasks(tasks, jobs, progress)
    summaries = _summarize(
        "fig3", rows, "iters_to_cover_over_kn3", lambda r: r.iters_to_cover / (r.k * r.n**3)
    )
    summaries += _summarize(
        "fig3", rows, "iters_to_opt_over_kn3", lambda r: r.iters_to_opt / (r.k * r.n**3)
    )
    return rows, summaries


def experiment_cover_diversity(grid: GridSpec, jobs: int = 1, progress=None):
    """Random start, run to cover, all three tie-break variants; k=2 omitted.

    The statistic is imbalance_at_cover / opt_total - 1, i.e. the relative
    excess over the best reachable total imbalance.
    """
    cells = grid_cells(grid.n_values, include_k2=False)
    rows = []
    for measure_text in ("none", "total", "sorted"):
        tasks = _cell_tasks("fig4", measure_text, grid, cells, "cover", "random")
        rows.extend(_run_tasks(tasks, jobs, progress))
    for row in rows:
        if row.opt_total <= 0:
            raise AssertionError(f"nonpositive optimal imbalance in cell n={row.n} k={row.k}")
    summaries = _summarize(
        "fig4",
        rows,
        "imbalance_over_opt_minus_1",
        lambda r: r.imbalance_at_cover / r.opt_total - 1.0,
    )
    return rows, summaries


def experiment_worst_start(grid: GridSpec, measure: MeasureKind, jobs: int = 1, progress=None):
    """Worst-diversity covering start, run to optimal diversity.

    Times are normalized by k * n^2 * ln(n); k=2 cells come out as exactly 0
    because their covering population is unique and already optimal.
    """
    if measure is MeasureKind.NO_DIVERSITY:
        raise ValueError("worst-start experiment needs a diversity measure (total or sorted)")
    cells = grid_cells(grid.n_values)
    tasks = _cell_tasks("fig5", measure.value, grid, cells, "optimum", "worst")
    rows = _run_tasks(tasks, jobs, progress)
    summaries = _summarize(
        "fig5",
        rows,
        "iters_to_opt_over_kn2lnn",
        lambda r: r.iters_to_opt / (r.k * r.n**2 * math.log(r.n)),
    )
    return rows, summaries


def format_ratio(value: float) -> str:
    return f"{value:.10g}"


def write_runs_csv(path, rows) -> None:
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        fh.write(RUNS_HEADER + "\n")
        for r in rows:
            fh.write(
                ",".join(
                    [
                        r.experiment,
                        r.algorithm,
                        r.measure,
                        str(r.n),
                        str(r.k),
                        str(r.run_index),
                        str(r.seed),
                        _opt_int(r.iters_to_cover),
                        _opt_int(r.iters_to_opt),
                        _opt_int(r.imbalance_at_cover),
                        str(r.opt_total),
                        str(r.mu_max),
                        "true" if r.capped else "false",
                    ]
                )
                + "\n"
            )


def write_summary_csv(path, summaries) -> None:
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        fh.write(SUMMARY_HEADER + "\n")
        for s in summaries:
            fh.write(
                ",".join(
                    [
                        s.experiment,
                        s.algorithm,
                        s.measure,
                        str(s.n),
                        str(s.k),
                        s.statistic,
                        format_ratio(s.mean),
                        format_ratio(s.std),
                        str(s.runs),
                        str(s.capped),
                    ]
                )
                + "\n"
            )


def _opt_int(value) -> str:
    return "" if value is None else str(value)
