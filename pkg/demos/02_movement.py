"""
Movement models: waypoint walkers and ping-pong buses
=====================================================

Pedestrians and vehicles pick random reachable destinations and follow
shortest paths; buses sweep their route back and forth, starting from
evenly spaced stops.
"""

from importlib import resources
from pathlib import Path

from dtnsim import geodata, mobility
from dtnsim.rng import substream

data = Path(str(resources.files("dtnsim"))) / "data"

# --- buses: even placement along a route, then ping-pong traversal
route = geodata.load_route((data / "routes" / "route5.wkt").read_text(), name="route5")
cursors = mobility.place_nodes_on_route(route, n_hosts=4)
print(f"route5 has {len(route.stops)} stops; 4 buses start at",
      [c.stop_index for c in cursors])

cursor = cursors[0]
trail = []
for _ in range(2 * (len(route.stops) - 1)):
    cursor = mobility.next_route_leg(cursor)
    trail.append(cursor.stop_index)
print("one full out-and-back sweep of stop indices:", trail)

# --- walkers: random waypoints on the road graph
graph = geodata.build_map_graph(
    geodata.parse_wkt_document((data / "maps" / "grid2km.wkt").read_text()))
profile = mobility.DEFAULT_PROFILES["pedestrian"]
walker = mobility.MapWalker(graph, profile, substream(7, "move", "demo"))

dt = 0.5
positions = [walker.position]
for k in range(1, 1201):  # ten simulated minutes
    walker.step(k * dt, dt)
    positions.append(walker.position)

dist = sum(
    ((a.x - b.x) ** 2 + (a.y - b.y) ** 2) ** 0.5
    for a, b in zip(positions, positions[1:]))
print(f"\npedestrian walked {dist:.0f} m in 10 min "
      f"(speed range {profile.min_speed}-{profile.max_speed} m/s, "
      f"waits up to {profile.wait_max:.0f} s)")
print(f"started at {positions[0]}, ended at {positions[-1]}")

# same seed, same trace: movement is a pure function of the substream
walker2 = mobility.MapWalker(graph, profile, substream(7, "move", "demo"))
for k in range(1, 1201):
    walker2.step(k * dt, dt)
print("deterministic replay matches:", walker2.position == positions[-1])
