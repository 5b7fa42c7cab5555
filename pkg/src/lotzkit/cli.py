"""Command-line interface: single runs, batch experiments, oracle, verify."""
from __future__ import annotations

import argparse
import os
import sys
from pathlib import Path

from . import experiments, verify
from .core import ProblemParams
from .diversity import MeasureKind
from .evolve import RunConfig, run
from .experiments import RunRow, write_runs_csv, write_summary_csv
from .oracle import PopulationFill, build_covering_population, optimal_diversity


def _default_seed() -> int:
    return int(os.environ.get("EDO_SEED", "1"))


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="lotzkit",
        description="GSEMO / GSEMO_D runs and diversity oracles on the LOTZ_k benchmark",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p_run = sub.add_parser("run", help="execute one trial and print its record")
    p_run.add_argument("--n", type=int, required=True)
    p_run.add_argument("--k", type=int, required=True)
    p_run.add_argument("--measure", choices=["total", "sorted", "none"], default="total")
    p_run.add_argument("--seed", type=int, default=None)
    p_run.add_argument("--max-iters", type=int, default=None)
    p_run.add_argument("--init", choices=["random", "worst", "best"], default="random")
    p_run.add_argument(
        "--stop",
        choices=["opt", "cover"],
        default=None,
        help="stop condition; defaults to 'opt', or 'cover' when measure=none",
    )
    p_run.add_argument("--out", type=Path, default=None, help="append the run to this CSV file")

    p_exp = sub.add_parser("experiment", help="run one experiment grid, write runs/summary CSVs")
    p_exp.add_argument("--which", choices=["fig3", "fig4", "fig5"], required=True)
    p_exp.add_argument(
        "--measure",
        choices=["total", "sorted"],
        default="total",
        help="diversity measure for fig3/fig5 (fig4 always runs all three variants)",
    )
    p_exp.add_argument("--runs", type=int, default=128)
    p_exp.add_argument("--seed", type=int, default=None)
    p_exp.add_argument("--scale", choices=["paper", "small"], default="paper")
    p_exp.add_argument("--out-dir", type=Path, default=Path("."))
    p_exp.add_argument("--jobs", type=int, default=os.cpu_count() or 1)

    p_oracle = sub.add_parser("oracle", help="print mu_max, parity, opt_total and b_opt")
    p_oracle.add_argument("--n", type=int, required=True)
    p_oracle.add_argument("--k", type=int, required=True)
    p_oracle.add_argument("--format", choices=["text", "csv"], default="text")

    p_verify = sub.add_parser("verify", help="brute-force cross-checks of the oracle formulas")
    p_verify.add_argument("--max-n", type=int, default=10)

    return parser


def cmd_run(args) -> int:
    try:
        params = ProblemParams(args.n, args.k)
    except ValueError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    measure = MeasureKind.parse(args.measure)
    seed = args.seed if args.seed is not None else _default_seed()
    stop = args.stop or ("cover" if measure is MeasureKind.NO_DIVERSITY else "opt")
    cfg = RunConfig(
        params=params,
        measure=measure,
        seed=seed,
        max_iters=args.max_iters,
        init="random" if args.init == "random" else "given",
        stop_at="optimum" if stop == "opt" else "cover",
    )
    initial = None
    if args.init == "worst":
        initial = build_covering_population(params, PopulationFill.WORST_DIVERSITY)
    elif args.init == "best":
        initial = build_covering_population(params, PopulationFill.BEST_DIVERSITY)
    record = run(cfg, initial)
    target = optimal_diversity(params)
    print(
        f"n={params.n} k={params.k} measure={measure.value} seed={seed} "
        f"iters_to_cover={_show(record.iters_to_cover)} "
        f"iters_to_opt={_show(record.iters_to_opt)} "
        f"imbalance_at_cover={_show(record.imbalance_at_cover)} "
        f"final_phi={_show(record.final_phi)} capped={'true' if record.capped else 'false'}"
    )
    if args.out is not None:
        row = RunRow(
            experiment="run",
            algorithm="gsemo" if measure is MeasureKind.NO_DIVERSITY else "gsemo_d",
            measure=measure.value,
            n=params.n,
            k=params.k,
            run_index=0,
            seed=seed,
            iters_to_cover=record.iters_to_cover,
            iters_to_opt=record.iters_to_opt,
            imbalance_at_cover=record.imbalance_at_cover,
            opt_total=target.opt_total,
            mu_max=target.mu_max,
            capped=record.capped,
        )
        _append_row(args.out, row)
    return 1 if record.capped else 0


def cmd_experiment(args) -> int:
    seed = args.seed if args.seed is not None else _default_seed()
    grid = experiments.GridSpec.preset(args.scale, runs_per_cell=args.runs, base_seed=seed)
    measure = MeasureKind.parse(args.measure)

    done = {"count": 0}

    def progress(row: RunRow) -> None:
        done["count"] += 1
        if row.run_index == grid.runs_per_cell - 1:
            print(
                f"[{args.which}] {row.algorithm}/{row.measure} n={row.n} k={row.k}: "
                f"{grid.runs_per_cell} runs done",
                file=sys.stderr,
            )

    if args.which == "fig3":
        rows, summaries = experiments.experiment_full_run(grid, measure, args.jobs, progress)
    elif args.which == "fig4":
        rows, summaries = experiments.experiment_cover_diversity(grid, args.jobs, progress)
    else:
        rows, summaries = experiments.experiment_worst_start(grid, measure, args.jobs, progress)

    args.out_dir.mkdir(parents=True, exist_ok=True)
    write_runs_csv(args.out_dir / "runs.csv", rows)
    write_summary_csv(args.out_dir / "summary.csv", summaries)
    print(f"wrote {args.out_dir / 'runs.csv'} and {args.out_dir / 'summary.csv'}", file=sys.stderr)
    return 1 if any(r.capped for r in rows) else 0


def cmd_oracle(args) -> int:
    try:
        params = ProblemParams(args.n, args.k)
    except ValueError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    target = optimal_diversity(params)
    if args.format == "text":
        print(
            f"n={params.n} k={params.k} mu_max={target.mu_max} "
            f"parity={target.delta} opt_total={target.opt_total}"
        )
        print("b_opt: " + " ".join(str(int(v)) for v in target.b_opt))
    else:
        print("n,k,position,b_opt,mu_max,parity,opt_total")
        for i, v in enumerate(target.b_opt, start=1):
            print(
                f"{params.n},{params.k},{i},{int(v)},{target.mu_max},"
                f"{target.delta},{target.opt_total}"
            )
    return 0


def cmd_verify(args) -> int:
    try:
        results = verify.run_checks(args.max_n)
    except ValueError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    failed = False
    for res in results:
        status = "PASS" if res.ok else "FAIL"
        line = f"[{status}] {res.name}"
        if not res.ok and res.detail:
            line += f" -- {res.detail}"
        print(line)
        failed = failed or not res.ok
    return 1 if failed else 0


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    if args.command == "run":
        return cmd_run(args)
    if args.command == "experiment":
        return cmd_experiment(args)
    if args.command == "oracle":
        return cmd_oracle(args)
    return cmd_verify(args)


def _show(value) -> str:
    return "-" if value is None else str(value)


def _append_row(path: Path, row: RunRow) -> None:
    new_file = not path.exists()
    with open(path, "a", encoding="utf-8", newline="\n") as fh:
        if new_file:
            fh.write(experiments.RUNS_HEADER + "\n")
        fh.write(
            ",".join(
                [
                    row.experiment,
                    row.algorithm,
                    row.measure,
                    str(row.n),
                    str(row.k),
                    str(row.run_index),
                    str(row.seed),
                    "" if row.iters_to_cover is None else str(row.iters_to_cover),
                    "" if row.iters_to_opt is None else str(row.iters_to_opt),
                    "" if row.imbalance_at_cover is None else str(row.imbalance_at_cover),
                    str(row.opt_total),
                    str(row.mu_max),
                    "true" if row.capped else "false",
                ]
            )
            + "\n"
        )


if __name__ == "__main__":
    sys.exit(main())
