"""Load sweep summaries and render one metric across series.

The plotted table is also written beside the figure as ``<out>.data.csv``:
a pure projection of the inputs (series label, axis value, metric value),
sorted by axis value and nothing else. Undefined metric values (``NaN``)
break the plotted line rather than interpolating across the gap.
"""

from __future__ import annotations

import csv
import math
import sys
from dataclasses import dataclass
from pathlib import Path


class PlotError(ValueError):
    """Bad inputs: unreadable CSV, unknown metric, unsupported format."""


@dataclass(frozen=True)
class SeriesSpec:
    """One plotted line: a label and the summary CSV it comes from."""

    label: str
    path: str
    style: str | None = None  # matplotlib format string, e.g. "o-"


@dataclass
class _Series:
    label: str
    axis_name: str
    points: list[tuple[object, float]]  # (axis value, metric value)
    style: str | None


def _to_axis_value(text: str):
    try:
        return float(text)
    except ValueError:
        return text


def _to_metric_value(text: str) -> float:
    if text in ("", "NaN", "nan"):
        return math.nan
    try:
        return float(text)
    except ValueError:
        return math.nan


def _fmt(v) -> str:
    if isinstance(v, float):
        if math.isnan(v):
            return "NaN"
        if v.is_integer() and abs(v) < 1e15:
            return str(int(v))
        return repr(v)
    return str(v)


def _load_series(spec: SeriesSpec, metric: str) -> _Series:
    path = Path(spec.path)
    try:
        text = path.read_text()
    except OSError as exc:
        raise PlotError(f"{spec.path}: {exc}") from None
    rows = list(csv.reader(text.splitlines()))
    if not rows or len(rows[0]) < 2:
        raise PlotError(f"{spec.path}: not a sweep summary (need axis + metric columns)")
    header = rows[0]
    axis_name = header[0]
    if metric not in header[1:]:
        available = ", ".join(header[1:])
        raise PlotError(f"{spec.path}: no column {metric!r}; available: {available}")
    col = header.index(metric)
    points = []
    for lineno, row in enumerate(rows[1:], start=2):
        if not row:
            continue
        if len(row) != len(header):
            raise PlotError(f"{spec.path}: line {lineno} has {len(row)} fields, "
                            f"expected {len(header)}")
        points.append((_to_axis_value(row[0]), _to_metric_value(row[col])))
    points.sort(key=lambda p: (isinstance(p[0], str), p[0]))
    return _Series(label=spec.label, axis_name=axis_name, points=points, style=spec.style)


def _data_csv(series: list[_Series], axis_name: str, metric: str) -> str:
    lines = [f"series,{axis_name},{metric}"]
    for s in series:
        for x, y in s.points:
            lines.append(f"{s.label},{_fmt(x)},{_fmt(y)}")
    return "\n".join(lines) + "\n"


def render_metric_plot(series: list[SeriesSpec], metric: str, out_path: str | Path,
                       fmt: str | None = None) -> Path:
    """Render a line chart of ``metric`` (y) against the swept axis (x).

    One line and legend entry per series. The format comes from the output
    suffix (``.png`` or ``.svg``) unless passed explicitly. Returns the
    figure path; the plotted table lands at ``<out>.data.csv``.
    """
    if not series:
        raise PlotError("no input series")
    out = Path(out_path)
    fmt = fmt or out.suffix.lstrip(".").lower()
    if fmt not in ("png", "svg"):
        raise PlotError(f"unsupported format {fmt!r}: pick png or svg")

    loaded = [_load_series(spec, metric) for spec in series]
    axis_name = loaded[0].axis_name
    axis_sets = [{x for x, _ in s.points} for s in loaded]
    if len(loaded) > 1 and any(a != axis_sets[0] for a in axis_sets[1:]):
        print(f"simplot: warning: series cover different {axis_name} values; "
              "plotting the union with gaps", file=sys.stderr)

    import matplotlib
    matplotlib.use("Agg")
    import matplotlib.pyplot as plt

    categorical = any(isinstance(x, str) for s in loaded for x, _ in s.points)
    if categorical:
        union = sorted({str(x) for s in loaded for x, _ in s.points})
        position = {v: i for i, v in enumerate(union)}

    fig, ax = plt.subplots(figsize=(7, 4.5))
    for s in loaded:
        if categorical:
            xs = [position[str(x)] for x, _ in s.points]
        else:
            xs = [x for x, _ in s.points]
        ys = [y for _, y in s.points]
        ax.plot(xs, ys, s.style or "o-", label=s.label)
    if categorical:
        ax.set_xticks(range(len(union)), union)
    ax.set_xlabel(axis_name)
    ax.set_ylabel(metric)
    ax.set_title(f"{metric} vs {axis_name}")
    ax.grid(True, alpha=0.3)
    ax.legend()
    fig.tight_layout()
    out.parent.mkdir(parents=True, exist_ok=True)
    fig.savefig(out, format=fmt)
    plt.close(fig)

    data_path = out.with_name(out.name + ".data.csv")
    data_path.write_text(_data_csv(loaded, axis_name, metric))
    return out
