import math
import random

import pytest

from dtnsim.geodata import (
    GeodataError,
    GeoPoint,
    PathRecord,
    Polyline,
    Route,
    assemble_route,
    build_map_graph,
    parse_wkt,
    parse_wkt_document,
    polyline_to_wkt,
    read_path_records,
    split_tracks,
    write_wkt,
)


def pl(*coords):
    return Polyline(tuple(GeoPoint(float(x), float(y)) for x, y in coords))


# ---------------------------------------------------------------------------
# split_tracks


def test_split_tracks_member_goes_to_tracks():
    rec = PathRecord("LINESTRING (0 0, 1 0)", "track")
    roads, tracks = split_tracks([rec], {"track"})
    assert roads == [] and tracks == [rec]


def test_split_tracks_nonmember_goes_to_roads():
    rec = PathRecord("LINESTRING (0 0, 1 0)", "residential")
    roads, tracks = split_tracks([rec], {"track"})
    assert roads == [rec] and tracks == []


def test_split_tracks_empty_input():
    assert split_tracks([], {"track"}) == ([], [])


def test_split_tracks_is_exhaustive_partition_and_order_preserving():
    rng = random.Random(7)
    classes = ["track", "residential", "path", "primary", "Track"]
    records = [PathRecord("LINESTRING (0 0, 1 1)", rng.choice(classes)) for _ in range(200)]
    roads, tracks = split_tracks(records, {"track", "path"})
    assert len(roads) + len(tracks) == len(records)
    assert all(r.way_class not in {"track", "path"} for r in roads)
    assert all(t.way_class in {"track", "path"} for t in tracks)
    # case-sensitive: "Track" stays a road
    assert any(r.way_class == "Track" for r in roads)
    # order preserved within each side
    assert roads == [r for r in records if r.way_class not in {"track", "path"}]
    assert tracks == [r for r in records if r.way_class in {"track", "path"}]


def test_split_tracks_rejects_empty_class_set():
    with pytest.raises(GeodataError):
        split_tracks([], set())


# ---------------------------------------------------------------------------
# WKT parsing


def test_parse_minimal_linestring():
    out = parse_wkt_document("LINESTRING (0 0, 10 0)")
    assert out == [pl((0, 0), (10, 0))]


def test_parse_single_point_linestring_is_error():
    with pytest.raises(GeodataError, match="fewer than 2"):
        parse_wkt_document("LINESTRING (0 0)")


def test_parse_skips_points():
    out = parse_wkt("LINESTRING (0 0, 5 5)\nPOINT (1 2)\n")
    assert len(out.polylines) == 1
    assert out.points_skipped == 1


def test_parse_rejects_other_geometry_types_naming_line():
    with pytest.raises(GeodataError, match="line 2"):
        parse_wkt_document("LINESTRING (0 0, 1 1)\nPOLYGON ((0 0, 1 0, 1 1, 0 0))")


def test_parse_rejects_bad_numbers():
    with pytest.raises(GeodataError, match="line 1"):
        parse_wkt_document("LINESTRING (0 zero, 1 1)")


def test_parse_collapses_duplicate_vertices():
    out = parse_wkt("LINESTRING (0 0, 1 1, 1 1, 2 2)")
    assert out.polylines[0].points == pl((0, 0), (1, 1), (2, 2)).points
    assert out.duplicates_collapsed == 1


def test_wkt_round_trip_full_precision():
    rng = random.Random(3)
    lines = []
    for _ in range(25):
        n = rng.randint(2, 8)
        pts = []
        while len(pts) < n:
            cand = GeoPoint(rng.uniform(-1e5, 1e5), rng.uniform(-1e5, 1e5))
            if not pts or cand != pts[-1]:
                pts.append(cand)
        lines.append(Polyline(tuple(pts)))
    text = write_wkt(lines)
    again = parse_wkt_document(text)
    assert again == lines
    # serialization is a fixed point once normalized
    assert write_wkt(again) == text


def test_polyline_rejects_consecutive_duplicates():
    with pytest.raises(GeodataError):
        pl((0, 0), (0, 0), (1, 1))


# ---------------------------------------------------------------------------
# build_map_graph


def test_graph_shared_endpoint_merges():
    g = build_map_graph([pl((0, 0), (1, 0)), pl((1, 0), (2, 0))])
    assert len(g.vertices) == 3
    assert len(g.edges) == 2
    assert g.n_components == 1


def test_graph_disjoint_polylines_stay_apart():
    g = build_map_graph([pl((0, 0), (1, 0)), pl((5, 5), (6, 5))])
    assert len(g.vertices) == 4
    assert len(g.edges) == 2
    assert g.n_components == 2


def test_graph_negative_epsilon_rejected():
    with pytest.raises(GeodataError):
        build_map_graph([pl((0, 0), (1, 0))], snap_epsilon=-1.0)


def _brute_force_counts(polylines, eps):
    """Independent oracle: union-find over all points, O(n^2) pair scan."""
    points = [p for line in polylines for p in line.points]
    n = len(points)
    parent = list(range(n))

    def find(i):
        while parent[i] != i:
            parent[i] = parent[parent[i]]
            i = parent[i]
        return i

    for i in range(n):
        for j in range(i + 1, n):
            if math.dist(points[i], points[j]) <= eps:
                parent[find(i)] = find(j)
    labels = {}
    cluster = []
    for i in range(n):
        r = find(i)
        if r not in labels:
            labels[r] = len(labels)
        cluster.append(labels[r])
    edges = set()
    pos = 0
    for line in polylines:
        ids = cluster[pos:pos + len(line.points)]
        pos += len(line.points)
        for a, b in zip(ids, ids[1:]):
            if a != b:
                edges.add((min(a, b), max(a, b)))
    return len(labels), len(edges)


@pytest.mark.parametrize("eps", [0.0, 0.05, 0.5])
def test_graph_counts_match_brute_force_oracle(eps):
    rng = random.Random(42)
    # random polylines on a coarse lattice so coincidences actually happen
    lines = []
    for _ in range(20):
        pts = []
        x, y = rng.randint(0, 8), rng.randint(0, 8)
        pts.append(GeoPoint(x * 1.0, y * 1.0))
        for _ in range(rng.randint(1, 5)):
            x += rng.choice([-1, 0, 1])
            y += rng.choice([-1, 0, 1])
            cand = GeoPoint(x * 1.0, y * 1.0)
            if cand != pts[-1]:
                pts.append(cand)
        if len(pts) >= 2:
            lines.append(Polyline(tuple(pts)))
    g = build_map_graph(lines, snap_epsilon=eps)
    nv, ne = _brute_force_counts(lines, eps)
    assert len(g.vertices) == nv
    assert len(g.edges) == ne


def test_graph_edge_lengths_are_euclidean():
    g = build_map_graph([pl((0, 0), (3, 4), (3, 10))])
    for i, j, length in g.edges:
        assert length == pytest.approx(math.dist(g.vertices[i], g.vertices[j]), rel=1e-9)


def test_graph_total_length_invariant_under_input_permutation():
    rng = random.Random(11)
    lines = [pl((i, 0), (i + 1, 0), (i + 1, 1)) for i in range(10)]
    g1 = build_map_graph(lines)
    shuffled = lines[:]
    rng.shuffle(shuffled)
    g2 = build_map_graph(shuffled)
    assert g1.total_edge_length() == pytest.approx(g2.total_edge_length(), rel=1e-12)


def test_graph_shortest_path_endpoints():
    g = build_map_graph([pl((0, 0), (1, 0), (2, 0)), pl((0, 0), (0, 1), (2, 1), (2, 0))])
    path = g.shortest_path(0, 2)
    assert path[0] == 0 and path[-1] == 2
    # straight line beats the detour
    assert [g.vertices[v] for v in path] == [(0, 0), (1, 0), (2, 0)]


# ---------------------------------------------------------------------------
# assemble_route


def test_assemble_two_contiguous_segments():
    r = assemble_route([pl((0, 0), (1, 0)), pl((1, 0), (2, 0))])
    assert r.stops == pl((0, 0), (1, 0), (2, 0)).points


def test_assemble_single_segment_identity():
    seg = pl((0, 0), (1, 0), (2, 5))
    r = assemble_route([seg])
    assert r.stops == seg.points


def test_assemble_gap_error_names_segments():
    with pytest.raises(GeodataError, match="segments 0 and 1"):
        assemble_route([pl((0, 0), (1, 0)), pl((3, 0), (4, 0))])


def test_assemble_stop_count_formula():
    segs = [pl((0, 0), (1, 0), (2, 0)), pl((2, 0), (3, 0)), pl((3, 0), (3, 1), (3, 2))]
    r = assemble_route(segs)
    assert len(r.stops) == sum(len(s.points) for s in segs) - (len(segs) - 1)


def test_cut_and_reassemble_is_identity():
    rng = random.Random(5)
    pts = [GeoPoint(float(i), float(rng.randint(0, 3))) for i in range(12)]
    pts = [p for k, p in enumerate(pts) if k == 0 or p != pts[k - 1]]
    route = Route(tuple(pts), name="r")
    for cut in range(1, len(pts) - 1):
        first = Polyline(tuple(pts[:cut + 1]))
        second = Polyline(tuple(pts[cut:]))
        again = assemble_route([first, second], name="r")
        assert again.stops == route.stops


# ---------------------------------------------------------------------------
# CSV records


CSV_TEXT = '''WKT,highway,name
"LINESTRING (0 0, 10 0)",residential,Main St
"LINESTRING (10 0, 10 10)",track,Farm Path
"LINESTRING (0 0, 0 10)",primary,High Rd
'''


def test_read_path_records_parses_quoted_wkt():
    recs = read_path_records(CSV_TEXT)
    assert [r.way_class for r in recs] == ["residential", "track", "primary"]
    roads, tracks = split_tracks(recs)
    assert len(roads) == 2 and len(tracks) == 1


def test_read_path_records_missing_column():
    with pytest.raises(GeodataError, match="lacks column"):
        read_path_records("geom,kind\na,b\n")


def test_read_path_records_bad_geometry_names_row():
    bad = 'WKT,highway\n"LINESTRING (0 0, 1 0)",track\n"POLYGON ((0 0))",primary\n'
    with pytest.raises(GeodataError, match="row 2"):
        read_path_records(bad)


def test_read_path_records_malformed_row():
    bad = 'WKT,highway\n"LINESTRING (0 0, 1 0)",track,extra,fields,here\n'
    with pytest.raises(GeodataError, match="row 1"):
        read_path_records(bad)


def test_serialize_normalizes_then_fixes():
    rec = PathRecord("LINESTRING(0 0,10 0)", "residential")
    parsed = parse_wkt_document(rec.geometry)
    assert polyline_to_wkt(parsed[0]) == "LINESTRING (0 0, 10 0)"
