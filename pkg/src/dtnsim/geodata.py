"""Road-network ingestion: CSV exports, WKT documents, graphs and routes.

Input maps arrive either as CSV (one row per way, geometry in a quoted WKT
column, way class in a second column) or as plain WKT text with one geometry
per line. Coordinates are planar meters; projected exports (e.g. British
National Grid) can be used directly and no reprojection is ever attempted.

The module separates informal "track" ways from drivable roads, turns
polylines into an undirected graph whose edges carry Euclidean lengths, and
merges traced route segments into continuous bus routes.
"""

from __future__ import annotations

import csv
import io
import math
from dataclasses import dataclass, field
from typing import Iterable, NamedTuple, Sequence


class GeodataError(ValueError):
    """Raised for malformed CSV rows, bad WKT or broken route chains."""


class GeoPoint(NamedTuple):
    """A planar coordinate in meters."""

    x: float
    y: float


def _check_point(p: GeoPoint) -> None:
    if not (math.isfinite(p.x) and math.isfinite(p.y)):
        raise GeodataError(f"non-finite coordinate {p!r}")


@dataclass(frozen=True)
class Polyline:
    """An ordered run of at least two distinct consecutive points."""

    points: tuple[GeoPoint, ...]

    def __post_init__(self) -> None:
        if len(self.points) < 2:
            raise GeodataError(f"polyline needs >= 2 points, got {len(self.points)}")
        for p in self.points:
            _check_point(p)
        for a, b in zip(self.points, self.points[1:]):
            if a == b:
                raise GeodataError(f"consecutive duplicate point {a!r}")

    def length(self) -> float:
        return sum(math.dist(a, b) for a, b in zip(self.points, self.points[1:]))


@dataclass(frozen=True)
class PathRecord:
    """One row of an extracted ways CSV: raw WKT plus its way class."""

    geometry: str
    way_class: str


@dataclass(frozen=True)
class Route:
    """An ordered stop list a bus traverses back and forth."""

    stops: tuple[GeoPoint, ...]
    name: str = ""

    def __post_init__(self) -> None:
        if len(self.stops) < 2:
            raise GeodataError(f"route {self.name!r} needs >= 2 stops")
        for a, b in zip(self.stops, self.stops[1:]):
            if a == b:
                raise GeodataError(f"route {self.name!r} has identical consecutive stops {a!r}")


# ---------------------------------------------------------------------------
# CSV ingestion


def read_path_records(text: str, geometry_column: str = "WKT",
                      class_column: str = "highway") -> list[PathRecord]:
    """Parse a ways CSV into records, validating each geometry as a LINESTRING.

    Raises GeodataError naming the offending data row (1-based, header
    excluded) for missing columns or unparseable geometry.
    """
    reader = csv.DictReader(io.StringIO(text))
    if reader.fieldnames is None:
        raise GeodataError("empty CSV: no header row")
    for col in (geometry_column, class_column):
        if col not in reader.fieldnames:
            raise GeodataError(f"CSV header lacks column {col!r} (have {reader.fieldnames})")
    records = []
    for i, row in enumerate(reader, start=1):
        wkt = row.get(geometry_column)
        cls = row.get(class_column)
        if wkt is None or cls is None or None in row:
            raise GeodataError(f"row {i}: malformed CSV row (wrong field count)")
        try:
            _parse_geometry_line(wkt)
        except GeodataError as exc:
            raise GeodataError(f"row {i}: {exc}") from None
        records.append(PathRecord(geometry=wkt, way_class=cls))
    return records


def split_tracks(records: Sequence[PathRecord],
                 track_classes: Iterable[str] = ("track",)) -> tuple[list[PathRecord], list[PathRecord]]:
    """Partition records into (roads, tracks) by exact way-class membership."""
    track_set = set(track_classes)
    if not track_set:
        raise GeodataError("track_classes must not be empty")
    roads, tracks = [], []
    for rec in records:
        (tracks if rec.way_class in track_set else roads).append(rec)
    return roads, tracks


# ---------------------------------------------------------------------------
# WKT parsing and serialization


@dataclass
class WktDocument:
    """Parse result: the polylines plus a summary of what was skipped."""

    polylines: list[Polyline] = field(default_factory=list)
    points_skipped: int = 0
    duplicates_collapsed: int = 0

    def summary(self) -> str:
        return (f"{len(self.polylines)} linestrings, {self.points_skipped} points skipped, "
                f"{self.duplicates_collapsed} duplicate vertices collapsed")


def _parse_coord_list(body: str, where: str) -> list[GeoPoint]:
    pts = []
    for chunk in body.split(","):
        parts = chunk.split()
        if len(parts) < 2:
            raise GeodataError(f"{where}: bad coordinate {chunk.strip()!r}")
        try:
            # extra dimensions (z, m) beyond x y are ignored
            pts.append(GeoPoint(float(parts[0]), float(parts[1])))
        except ValueError:
            raise GeodataError(f"{where}: bad coordinate {chunk.strip()!r}") from None
    return pts


def _parse_geometry_line(line: str, where: str = "geometry") -> tuple[str, list[GeoPoint]]:
    """Parse one WKT geometry into (kind, points); kind is LINESTRING or POINT."""
    stripped = line.strip()
    head, _, rest = stripped.partition("(")
    kind = head.strip().upper()
    if kind not in ("LINESTRING", "POINT"):
        raise GeodataError(f"{where}: unsupported geometry type {head.strip()!r}")
    if not rest or not rest.rstrip().endswith(")"):
        raise GeodataError(f"{where}: malformed {kind} (missing coordinate list)")
    body = rest.rstrip()[:-1]
    pts = _parse_coord_list(body, where)
    if kind == "POINT" and len(pts) != 1:
        raise GeodataError(f"{where}: POINT must have exactly one coordinate")
    return kind, pts


def parse_wkt(text: str) -> WktDocument:
    """Parse a WKT document (one geometry per line) into polylines.

    POINT lines are skipped and counted; exact consecutive duplicate
    vertices within a LINESTRING are collapsed and counted. Any other
    geometry type, or a LINESTRING with fewer than two distinct points,
    is an error naming the line.
    """
    doc = WktDocument()
    for lineno, raw in enumerate(text.splitlines(), start=1):
        if not raw.strip():
            continue
        kind, pts = _parse_geometry_line(raw, where=f"line {lineno}")
        if kind == "POINT":
            doc.points_skipped += 1
            continue
        deduped = [pts[0]]
        for p in pts[1:]:
            if p == deduped[-1]:
                doc.duplicates_collapsed += 1
            else:
                deduped.append(p)
        if len(deduped) < 2:
            raise GeodataError(f"line {lineno}: LINESTRING has fewer than 2 distinct points")
        doc.polylines.append(Polyline(tuple(deduped)))
    return doc


def parse_wkt_document(text: str) -> list[Polyline]:
    """Parse a WKT document, returning just the polylines."""
    return parse_wkt(text).polylines


def _fmt_coord(v: float) -> str:
    # shortest exact round-trip; integral values render without a fraction
    return str(int(v)) if float(v).is_integer() else repr(float(v))


def polyline_to_wkt(polyline: Polyline) -> str:
    coords = ", ".join(f"{_fmt_coord(p.x)} {_fmt_coord(p.y)}" for p in polyline.points)
    return f"LINESTRING ({coords})"


def write_wkt(polylines: Iterable[Polyline]) -> str:
    return "".join(polyline_to_wkt(pl) + "\n" for pl in polylines)


# ---------------------------------------------------------------------------
# Graph construction


class _UnionFind:
    def __init__(self, n: int) -> None:
        self.parent = list(range(n))

    def find(self, i: int) -> int:
        root = i
        while self.parent[root] != root:
            root = self.parent[root]
        while self.parent[i] != root:
            self.parent[i], i = root, self.parent[i]
        return root

    def union(self, a: int, b: int) -> None:
        ra, rb = self.find(a), self.find(b)
        if ra != rb:
            # keep the smaller root so representatives follow input order
            if rb < ra:
                ra, rb = rb, ra
            self.parent[rb] = ra


class MapGraph:
    """Undirected road graph: vertices are coordinates, edges carry lengths.

    Movement models treat vertices as possible travel destinations and use
    shortest paths along the edges; shortest-path trees are cached per
    source vertex.
    """

    def __init__(self, vertices: list[GeoPoint], edges: list[tuple[int, int, float]]):
        self.vertices = vertices
        self.edges = edges
        self.adjacency: list[list[tuple[int, float]]] = [[] for _ in vertices]
        for i, j, length in edges:
            self.adjacency[i].append((j, length))
            self.adjacency[j].append((i, length))
        for nbrs in self.adjacency:
            nbrs.sort()
        self._component_id, self._members = self._components()
        self._path_trees: dict[int, list[int]] = {}

    def _components(self) -> tuple[list[int], dict[int, list[int]]]:
        uf = _UnionFind(len(self.vertices))
        for i, j, _ in self.edges:
            uf.union(i, j)
        comp = [uf.find(i) for i in range(len(self.vertices))]
        members: dict[int, list[int]] = {}
        for v, c in enumerate(comp):
            members.setdefault(c, []).append(v)
        return comp, members

    @property
    def n_components(self) -> int:
        return len(self._members)

    def component_members(self, vertex: int) -> list[int]:
        """All vertices reachable from ``vertex`` (including itself), ascending."""
        return self._members[self._component_id[vertex]]

    def total_edge_length(self) -> float:
        return sum(length for _, _, length in self.edges)

    def _shortest_path_tree(self, source: int) -> list[int]:
        """Predecessor array of the Dijkstra tree rooted at ``source``."""
        import heapq

        n = len(self.vertices)
        dist = [math.inf] * n
        prev = [-1] * n
        dist[source] = 0.0
        heap = [(0.0, source)]
        while heap:
            d, u = heapq.heappop(heap)
            if d > dist[u]:
                continue
            for v, w in self.adjacency[u]:
                nd = d + w
                if nd < dist[v]:
                    dist[v] = nd
                    prev[v] = u
                    heapq.heappush(heap, (nd, v))
        return prev

    def shortest_path(self, source: int, dest: int) -> list[int]:
        """Vertex indices of the minimum-length path, inclusive of both ends."""
        if source == dest:
            return [source]
        prev = self._path_trees.get(source)
        if prev is None:
            prev = self._shortest_path_tree(source)
            self._path_trees[source] = prev
        if prev[dest] == -1:
            raise GeodataError(f"no path from vertex {source} to {dest}")
        path = [dest]
        while path[-1] != source:
            path.append(prev[path[-1]])
        path.reverse()
        return path

    def point(self, vertex: int) -> GeoPoint:
        return self.vertices[vertex]


def build_map_graph(polylines: Sequence[Polyline], snap_epsilon: float = 0.0) -> MapGraph:
    """Snap polyline vertices into shared graph vertices and collect edges.

    Coordinates within ``snap_epsilon`` of each other merge into one vertex
    (transitively, as clusters); with the default epsilon of 0 only exact
    coordinate matches merge, which suits machine-generated exports. Each
    consecutive point pair becomes one undirected edge; duplicates collapse.
    """
    if snap_epsilon < 0:
        raise GeodataError(f"snap_epsilon must be >= 0, got {snap_epsilon}")
    if not polylines:
        raise GeodataError("no polylines to build a graph from")

    points: list[GeoPoint] = []
    for pl in polylines:
        points.extend(pl.points)

    if snap_epsilon == 0.0:
        index_of: dict[GeoPoint, int] = {}
        cluster = []
        for p in points:
            if p not in index_of:
                index_of[p] = len(index_of)
            cluster.append(index_of[p])
        n_vertices = len(index_of)
        representative = [GeoPoint(0.0, 0.0)] * n_vertices
        for p, i in index_of.items():
            representative[i] = p
    else:
        cluster, representative = _snap_clusters(points, snap_epsilon)
        n_vertices = len(representative)

    vertices = representative
    edge_set: dict[tuple[int, int], float] = {}
    pos = 0
    for pl in polylines:
        ids = cluster[pos:pos + len(pl.points)]
        pos += len(pl.points)
        for a, b in zip(ids, ids[1:]):
            if a == b:
                continue  # snapped into a self-loop; drop it
            key = (a, b) if a < b else (b, a)
            if key not in edge_set:
                edge_set[key] = math.dist(vertices[key[0]], vertices[key[1]])
    edges = [(i, j, length) for (i, j), length in edge_set.items()]
    return MapGraph(vertices, edges)


def _snap_clusters(points: list[GeoPoint], eps: float) -> tuple[list[int], list[GeoPoint]]:
    """Union points within ``eps`` (transitive closure) via a cell grid."""
    uf = _UnionFind(len(points))
    grid: dict[tuple[int, int], list[int]] = {}
    for idx, p in enumerate(points):
        cx, cy = int(math.floor(p.x / eps)), int(math.floor(p.y / eps))
        for dx in (-1, 0, 1):
            for dy in (-1, 0, 1):
                for other in grid.get((cx + dx, cy + dy), ()):
                    if math.dist(p, points[other]) <= eps:
                        uf.union(idx, other)
        grid.setdefault((cx, cy), []).append(idx)

    cluster_index: dict[int, int] = {}
    cluster = []
    representative: list[GeoPoint] = []
    for idx, p in enumerate(points):
        root = uf.find(idx)
        if root not in cluster_index:
            cluster_index[root] = len(representative)
            representative.append(points[root])
        cluster.append(cluster_index[root])
    return cluster, representative


# ---------------------------------------------------------------------------
# Route assembly


def assemble_route(segments: Sequence[Polyline], name: str = "",
                   snap_epsilon: float = 0.0) -> Route:
    """Merge traced segments into one continuous route.

    Consecutive segments must chain: the last point of one must equal the
    first point of the next (within ``snap_epsilon``). The junction point is
    kept once, so the stop count is the total point count minus one per join.
    """
    if not segments:
        raise GeodataError("no segments to assemble")
    stops: list[GeoPoint] = list(segments[0].points)
    for k in range(1, len(segments)):
        tail, head = stops[-1], segments[k].points[0]
        if math.dist(tail, head) > snap_epsilon:
            raise GeodataError(
                f"route {name!r}: segments {k - 1} and {k} do not touch "
                f"(gap {math.dist(tail, head):.3f} m between {tail} and {head})")
        stops.extend(segments[k].points[1:])
    return Route(stops=tuple(stops), name=name)


def load_route(text: str, name: str = "") -> Route:
    """Parse a WKT route file and merge its linestrings in file order."""
    return assemble_route(parse_wkt_document(text), name=name)
