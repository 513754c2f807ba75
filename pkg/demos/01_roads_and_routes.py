"""
Ingesting map data: CSV ways, track filtering, graphs and routes
================================================================

Road data arrives as a CSV export with the geometry in a WKT column and the
way class in a second column. This walk-through splits informal "tracks"
from drivable roads, builds the movement graph, and merges route segments.
"""

from importlib import resources
from pathlib import Path

from dtnsim import geodata

data = Path(str(resources.files("dtnsim"))) / "data"

# --- 1. read the CSV and separate tracks from established roads
csv_text = (data / "maps" / "sample_ways.csv").read_text()
records = geodata.read_path_records(csv_text)  # columns: WKT, highway
roads, tracks = geodata.split_tracks(records, track_classes={"track"})
print(f"{len(records)} ways -> {len(roads)} roads, {len(tracks)} tracks")
for t in tracks:
    print("  filtered:", t.geometry[:40], "...", f"[{t.way_class}]")

# --- 2. parse WKT into polylines; POINT rows would be skipped and counted
doc = geodata.parse_wkt((data / "maps" / "grid2km.wkt").read_text())
print("\ngrid map:", doc.summary())

# --- 3. snap shared coordinates into one graph
graph = geodata.build_map_graph(doc.polylines)
print(f"graph: {len(graph.vertices)} vertices, {len(graph.edges)} edges, "
      f"{graph.n_components} component(s), "
      f"{graph.total_edge_length() / 1000:.1f} km of road")

# --- 4. shortest path between two corners
path = graph.shortest_path(0, len(graph.vertices) - 1)
length = sum(
    ((graph.point(a).x - graph.point(b).x) ** 2 + (graph.point(a).y - graph.point(b).y) ** 2) ** 0.5
    for a, b in zip(path, path[1:]))
print(f"corner-to-corner: {len(path)} vertices, {length:.0f} m")

# --- 5. traced route segments merge into one continuous stop list
segments = [
    geodata.Polyline((geodata.GeoPoint(0, 0), geodata.GeoPoint(200, 0))),
    geodata.Polyline((geodata.GeoPoint(200, 0), geodata.GeoPoint(200, 200),
                      geodata.GeoPoint(400, 200))),
]
route = geodata.assemble_route(segments, name="demo-route")
print(f"\nmerged route '{route.name}': {len(route.stops)} stops "
      f"(junction point kept once)")

# a shipped route, already merged into a single linestring
r8 = geodata.load_route((data / "routes" / "route8.wkt").read_text(), name="route8")
print(f"shipped route8: {len(r8.stops)} stops, "
      f"{geodata.Polyline(r8.stops).length() / 1000:.1f} km")
