import pytest

from plotkit import PlotError, SeriesSpec, render_metric_plot
from plotkit.cli import main

HEADER = ("saw.copies,created,started,relayed,aborted,dropped,delivered,"
          "delivery_prob,overhead_ratio,latency_avg,hopcount_avg,buffertime_avg,status")

GRID_CSV = f"""{HEADER}
2,118,399,150,249,40,36,0.305,3.16,1393,1.55,1102,ok
4,118,682,344,337,77,47,0.398,6.32,1262,2.04,1051,ok
8,118,1009,525,483,126,49,0.415,9.71,1224,2.42,996,ok
"""

ROUTES_CSV = f"""{HEADER}
2,118,2125,303,1821,66,31,0.262,8.77,1471,1.83,1220,ok
4,118,2418,482,1936,118,38,0.322,11.68,1401,2.23,1119,ok
8,118,2750,689,2060,183,41,0.347,15.80,1355,2.62,1004,ok
"""

GOLDEN_DATA = """series,saw.copies,delivery_prob
grid,2,0.305
grid,4,0.398
grid,8,0.415
routes,2,0.262
routes,4,0.322
routes,8,0.347
"""


@pytest.fixture
def two_series(tmp_path):
    a = tmp_path / "grid" / "sweep_summary.csv"
    b = tmp_path / "routes" / "sweep_summary.csv"
    a.parent.mkdir()
    b.parent.mkdir()
    a.write_text(GRID_CSV)
    b.write_text(ROUTES_CSV)
    return a, b


def test_p13_figure_plus_golden_projection(tmp_path, two_series):
    a, b = two_series
    out = tmp_path / "fig.png"
    rc = main(["--metric", "delivery_prob", "--out", str(out),
               "--labels", "grid,routes", str(a), str(b)])
    assert rc == 0
    assert out.is_file() and out.stat().st_size > 0
    data = (tmp_path / "fig.png.data.csv").read_bytes()
    assert data == GOLDEN_DATA.encode()
    print("[P13] figure rendered; .data.csv matches the golden projection: PASS")


def test_p13_missing_column_exits_nonzero(tmp_path, two_series, capsys):
    a, _ = two_series
    rc = main(["--metric", "no_such_col", "--out", str(tmp_path / "f.png"), str(a)])
    assert rc != 0
    err = capsys.readouterr().err
    assert "no_such_col" in err
    assert "delivery_prob" in err  # available columns are listed


def test_data_csv_row_count_two_by_five(tmp_path):
    rows = "\n".join(f"{v},{v / 100}" for v in (1, 2, 3, 4, 5))
    for name in ("s1", "s2"):
        (tmp_path / name).mkdir()
        (tmp_path / name / "sweep_summary.csv").write_text(f"buffer,delivery_prob\n{rows}\n")
    out = render_metric_plot(
        [SeriesSpec("s1", str(tmp_path / "s1" / "sweep_summary.csv")),
         SeriesSpec("s2", str(tmp_path / "s2" / "sweep_summary.csv"))],
        "delivery_prob", tmp_path / "fig.svg")
    lines = (tmp_path / "fig.svg.data.csv").read_text().splitlines()
    assert len(lines) == 1 + 10  # header + 2 series x 5 values


def test_regeneration_is_byte_identical(tmp_path, two_series):
    a, b = two_series
    specs = [SeriesSpec("grid", str(a)), SeriesSpec("routes", str(b))]
    render_metric_plot(specs, "relayed", tmp_path / "one.png")
    first = (tmp_path / "one.png.data.csv").read_bytes()
    render_metric_plot(specs, "relayed", tmp_path / "two.png")
    assert (tmp_path / "two.png.data.csv").read_bytes() == first


def test_nan_values_survive_projection(tmp_path):
    (tmp_path / "s").mkdir()
    src = tmp_path / "s" / "sweep_summary.csv"
    src.write_text("range,latency_avg,status\n10,5.5,ok\n30,NaN,failed\n50,4,ok\n")
    render_metric_plot([SeriesSpec("s", str(src))], "latency_avg", tmp_path / "f.png")
    data = (tmp_path / "f.png.data.csv").read_text()
    assert "s,30,NaN" in data.splitlines()


def test_axis_mismatch_warns_and_plots_union(tmp_path, capsys):
    for name, rows in (("a", "2,0.1\n4,0.2"), ("b", "4,0.3\n8,0.4")):
        (tmp_path / name).mkdir()
        (tmp_path / name / "sweep_summary.csv").write_text(f"copies,delivery_prob\n{rows}\n")
    rc = main(["--metric", "delivery_prob", "--out", str(tmp_path / "f.png"),
               str(tmp_path / "a" / "sweep_summary.csv"),
               str(tmp_path / "b" / "sweep_summary.csv")])
    assert rc == 0
    assert "union" in capsys.readouterr().err
    lines = (tmp_path / "f.png.data.csv").read_text().splitlines()
    assert len(lines) == 1 + 4  # only the pairs that exist


def test_axis_values_sorted_not_smoothed(tmp_path):
    (tmp_path / "s").mkdir()
    src = tmp_path / "s" / "sweep_summary.csv"
    src.write_text("nodes,relayed\n500,50\n100,10\n300,30\n")
    render_metric_plot([SeriesSpec("s", str(src))], "relayed", tmp_path / "f.png")
    lines = (tmp_path / "f.png.data.csv").read_text().splitlines()[1:]
    assert lines == ["s,100,10", "s,300,30", "s,500,50"]


def test_unsupported_format_rejected(tmp_path, two_series):
    a, _ = two_series
    with pytest.raises(PlotError, match="png or svg"):
        render_metric_plot([SeriesSpec("grid", str(a))], "relayed", tmp_path / "f.pdf")


def test_svg_output(tmp_path, two_series):
    a, _ = two_series
    out = render_metric_plot([SeriesSpec("grid", str(a))], "delivery_prob",
                             tmp_path / "fig.svg")
    assert out.read_text().lstrip().startswith("<?xml")
