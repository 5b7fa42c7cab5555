"""Command-line entry point: plots --which fig3 --in summary.csv --out fig3.svg"""
from __future__ import annotations

import argparse
import sys
from pathlib import Path

from .figures import FigureSpec, SummarySchemaError, render


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="plots", description="render experiment summary CSVs as charts"
    )
    parser.add_argument("--which", choices=["fig3", "fig4", "fig5"], required=True)
    parser.add_argument("--in", dest="input_path", type=Path, required=True, metavar="SUMMARY_CSV")
    parser.add_argument("--out", dest="output_path", type=Path, required=True, metavar="IMAGE")
    parser.add_argument("--png", action="store_true", help="write PNG instead of SVG")
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    spec = FigureSpec(
        which=args.which, input_path=args.input_path, output_path=args.output_path, png=args.png
    )
    try:
        render(spec)
    except SummarySchemaError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    return 0


if __name__ == "__main__":
    sys.exit(main())
