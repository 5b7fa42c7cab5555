"""Figure construction from summary.csv files.

The input schema is the summary written by `lotzkit experiment`:

    experiment,algorithm,measure,n,k,statistic,mean,std,runs,capped

Series are grouped by the k rule of the experiment grid (k = 2, 4, sqrt(n),
n/2, n); a cell belongs to every rule it realizes, so coinciding cells (for
example n = 16, k = 4 under both the "4" and "sqrt" rules) are drawn in each
matching series, as in the source charts.  Values are drawn exactly as read;
nothing is recomputed here.

Axis conventions per figure:

* fig3 -- mean iterations to cover (dashed) and to optimal diversity
  (solid), both already normalized by k*n^3; linear y.
* fig4 -- total imbalance at cover over the optimum, minus one; log10 y;
  solid = total-imbalance tie-break, dashed = sorted-vector tie-break,
  dash-dot = no diversity tie-break.
* fig5 -- mean iterations to optimal diversity from the worst covering
  population, normalized by k*n^2*ln(n); solid = total, dashed = sorted.

The x axis is always the problem size on a log2 scale.
"""
from __future__ import annotations

import csv
import math
from dataclasses import dataclass
from pathlib import Path

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt

EXPECTED_HEADER = [
    "experiment",
    "algorithm",
    "measure",
    "n",
    "k",
    "statistic",
    "mean",
    "std",
    "runs",
    "capped",
]

K_RULES = ("2", "4", "sqrt", "half", "n")
RULE_LABELS = {
    "2": "k = 2",
    "4": "k = 4",
    "sqrt": "k = sqrt(n)",
    "half": "k = n/2",
    "n": "k = n",
}
RULE_COLORS = {rule: f"C{i}" for i, rule in enumerate(K_RULES)}

SVG_HASHSALT = "lotzplots"


class SummarySchemaError(ValueError):
    """The input file does not look like a lotzkit summary.csv."""


@dataclass(frozen=True)
class FigureSpec:
    which: str
    input_path: Path
    output_path: Path
    png: bool = False

    def __post_init__(self):
        if self.which not in ("fig3", "fig4", "fig5"):
            raise ValueError(f"unknown figure {self.which!r}; expected fig3|fig4|fig5")


def rule_k(rule: str, n: int) -> int:
    if rule == "2":
        return 2
    if rule == "4":
        return 4
    if rule == "sqrt":
        return math.isqrt(n)
    if rule == "half":
        return n // 2
    return n


def read_summary(path) -> list[dict]:
    """Parse and validate a summary.csv; raises SummarySchemaError on mismatch."""
    try:
        with open(path, encoding="utf-8", newline="") as fh:
            reader = csv.reader(fh)
            header = next(reader, None)
            if header != EXPECTED_HEADER:
                raise SummarySchemaError(
                    f"{path}: header {header} does not match the summary schema {EXPECTED_HEADER}"
                )
            rows = []
            for line_no, record in enumerate(reader, start=2):
                if len(record) != len(EXPECTED_HEADER):
                    raise SummarySchemaError(f"{path}:{line_no}: expected {len(EXPECTED_HEADER)} fields")
                row = dict(zip(EXPECTED_HEADER, record))
                try:
                    row["n"] = int(row["n"])
                    row["k"] = int(row["k"])
                    row["mean"] = float(row["mean"])
                    row["std"] = float(row["std"])
                    row["runs"] = int(row["runs"])
                    row["capped"] = int(row["capped"])
                except ValueError as exc:
                    raise SummarySchemaError(f"{path}:{line_no}: {exc}") from exc
                rows.append(row)
    except OSError as exc:
        raise SummarySchemaError(f"cannot read {path}: {exc}") from exc
    return rows


def _series_points(rows, rule, **field_filter):
    points = [
        (row["n"], row["mean"], row["std"])
        for row in rows
        if row["k"] == rule_k(rule, row["n"])
        and all(row[field] == value for field, value in field_filter.items())
    ]
    return sorted(points)


def _draw(ax, points, *, color, linestyle, label=None):
    if not points:
        return
    ns = [p[0] for p in points]
    means = [p[1] for p in points]
    stds = [p[2] for p in points]
    ax.errorbar(
        ns,
        means,
        yerr=stds,
        color=color,
        linestyle=linestyle,
        marker="o",
        markersize=3,
        capsize=2,
        label=label,
    )


def build_figure(which: str, rows: list[dict]):
    rows = [r for r in rows if r["experiment"] == which]
    if not rows:
        raise SummarySchemaError(f"summary holds no {which} rows")
    fig, ax = plt.subplots(figsize=(7.0, 4.5))
    ax.set_xscale("log", base=2)
    ax.grid(True, which="major", alpha=0.4)
    ax.set_xlabel("problem size n")

    if which == "fig3":
        ax.set_ylabel("iterations / (k n^3)")
        for rule in K_RULES:
            color = RULE_COLORS[rule]
            solid = _series_points(rows, rule, statistic="iters_to_opt_over_kn3")
            dashed = _series_points(rows, rule, statistic="iters_to_cover_over_kn3")
            _draw(ax, solid, color=color, linestyle="-", label=RULE_LABELS[rule] if solid else None)
            _draw(ax, dashed, color=color, linestyle="--")
        ax.set_ylim(bottom=0)
    elif which == "fig4":
        ax.set_yscale("log", base=10)
        ax.set_ylabel("total imbalance / optimum - 1")
        for rule in K_RULES:
            color = RULE_COLORS[rule]
            solid = _series_points(rows, rule, algorithm="gsemo_d", measure="total")
            dashed = _series_points(rows, rule, algorithm="gsemo_d", measure="sorted")
            dashdot = _series_points(rows, rule, algorithm="gsemo", measure="none")
            _draw(ax, solid, color=color, linestyle="-", label=RULE_LABELS[rule] if solid else None)
            _draw(ax, dashed, color=color, linestyle="--")
            _draw(ax, dashdot, color=color, linestyle="-.")
    else:
        ax.set_ylabel("iterations / (k n^2 ln n)")
        for rule in K_RULES:
            color = RULE_COLORS[rule]
            solid = _series_points(rows, rule, measure="total")
            dashed = _series_points(rows, rule, measure="sorted")
            _draw(ax, solid, color=color, linestyle="-", label=RULE_LABELS[rule] if solid else None)
            _draw(ax, dashed, color=color, linestyle="--")
        ax.set_ylim(bottom=0)

    if ax.get_legend_handles_labels()[1]:
        ax.legend(loc="best", fontsize=9)
    fig.tight_layout()
    return fig


def render(spec: FigureSpec) -> None:
    """Render one figure to SVG (or PNG); SVG output is byte-reproducible."""
    rows = read_summary(spec.input_path)
    with plt.rc_context({"svg.hashsalt": SVG_HASHSALT}):
        fig = build_figure(spec.which, rows)
        try:
            if spec.png:
                fig.savefig(spec.output_path, format="png", dpi=150)
            else:
                fig.savefig(spec.output_path, format="svg", metadata={"Date": None})
        finally:
            plt.close(fig)
