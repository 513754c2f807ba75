"""Figure rendering for simulator sweep summaries.

Consumes ``sweep_summary.csv`` files (first column: the swept axis value,
remaining columns: metrics) and renders one line per file for a chosen
metric. Beside every figure it writes ``<out>.data.csv``, the exact table
that was plotted, so results can be golden-tested without comparing pixels.
"""

from .render import PlotError, SeriesSpec, render_metric_plot

__all__ = ["PlotError", "SeriesSpec", "render_metric_plot"]

__version__ = "0.1.0"
