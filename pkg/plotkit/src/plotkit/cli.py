"""``simplot``: one metric, one figure, one line per summary CSV."""

from __future__ import annotations

import argparse
import sys
from pathlib import Path

from .render import PlotError, SeriesSpec, render_metric_plot


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="simplot",
        description="Plot a metric from sweep_summary.csv files; writes the "
                    "figure plus <out>.data.csv with the plotted table.")
    parser.add_argument("series", nargs="+", help="sweep summary CSV paths")
    parser.add_argument("--metric", required=True, help="metric column to plot")
    parser.add_argument("--out", required=True, help="figure path (.png or .svg)")
    parser.add_argument("--labels", default=None,
                        help="comma-separated legend labels (default: file stems)")
    parser.add_argument("--format", default=None, choices=["png", "svg"],
                        help="override the format implied by --out")
    return parser


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    if args.labels:
        labels = [l.strip() for l in args.labels.split(",")]
        if len(labels) != len(args.series):
            print(f"simplot: {len(args.series)} series but {len(labels)} labels",
                  file=sys.stderr)
            return 1
    else:
        labels = [Path(p).parent.name or Path(p).stem for p in args.series]
    specs = [SeriesSpec(label=label, path=path)
             for label, path in zip(labels, args.series)]
    try:
        out = render_metric_plot(specs, args.metric, args.out, fmt=args.format)
    except PlotError as exc:
        print(f"simplot: {exc}", file=sys.stderr)
        return 1
    print(f"simplot: wrote {out} and {out.name}.data.csv", file=sys.stderr)
    return 0


if __name__ == "__main__":
    sys.exit(main())
