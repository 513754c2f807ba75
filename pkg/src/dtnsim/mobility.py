"""Node movement: map-constrained waypoint travel and bus-route traversal.

Pedestrians and vehicles walk the road graph: each picks a random reachable
vertex, follows the shortest path to it, waits, and repeats. Buses traverse a
fixed route stop-to-stop, reversing direction at each terminus, with their
starting stops spread evenly along the route.

All draws come from a per-node generator, so node A's movement never depends
on how many draws node B made.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, replace
from typing import Callable, Sequence

import numpy as np

from .geodata import GeoPoint, MapGraph, Route

FORWARD = 1
BACKWARD = -1


@dataclass(frozen=True)
class SpeedProfile:
    """Per-class travel speed and stop-wait ranges (uniform draws)."""

    min_speed: float
    max_speed: float
    wait_min: float = 0.0
    wait_max: float = 0.0

    def __post_init__(self) -> None:
        if not (0 <= self.min_speed <= self.max_speed):
            raise ValueError(f"bad speed range [{self.min_speed}, {self.max_speed}]")
        if not (0 <= self.wait_min <= self.wait_max):
            raise ValueError(f"bad wait range [{self.wait_min}, {self.wait_max}]")


# Speeds the reference desk scenarios use; never stated by the use case
# itself, so every group can override them in its config block.
DEFAULT_PROFILES = {
    "pedestrian": SpeedProfile(0.5, 1.5, 0.0, 120.0),
    "vehicle": SpeedProfile(2.7, 13.9, 0.0, 0.0),
    "bus": SpeedProfile(2.7, 13.9, 0.0, 0.0),
}


@dataclass
class WaypointState:
    """A node's movement cursor: where it is and where it is still headed."""

    position: GeoPoint
    path: list[GeoPoint]
    leg_speed: float = 0.0
    wait_until: float = 0.0


@dataclass(frozen=True)
class RouteCursor:
    """Position along a route's stop list plus the direction of travel."""

    route: Route
    stop_index: int
    heading: int = FORWARD

    def __post_init__(self) -> None:
        if not (0 <= self.stop_index < len(self.route.stops)):
            raise ValueError(f"stop index {self.stop_index} outside route")
        if self.heading not in (FORWARD, BACKWARD):
            raise ValueError(f"heading must be +-1, got {self.heading}")


def place_nodes_on_route(route: Route, n_hosts: int, reverse: bool = False) -> list[RouteCursor]:
    """Spread ``n_hosts`` starting cursors evenly along the route's stops.

    The stride between consecutive hosts is ``stops // n_hosts`` (or
    ``stops - 1`` for a single host, avoiding the divide-by-zero of the
    general formula); any index landing past the end falls back to stop 0.
    """
    if n_hosts < 1:
        raise ValueError(f"need at least one host, got {n_hosts}")
    n_stops = len(route.stops)
    if n_stops < 2:
        raise ValueError("route must have at least 2 stops")
    if n_hosts == 1:
        step = n_stops - 1
    else:
        step = n_stops // n_hosts
    heading = BACKWARD if reverse else FORWARD
    cursors = []
    for i in range(n_hosts):
        index = i * step
        if index >= n_stops:
            index = 0
        cursors.append(RouteCursor(route, index, heading))
    return cursors


def next_route_leg(cursor: RouteCursor) -> RouteCursor:
    """Step one stop in the heading direction, reflecting at either terminus."""
    last = len(cursor.route.stops) - 1
    index = cursor.stop_index + cursor.heading
    heading = cursor.heading
    if index >= last:
        index = last
        heading = BACKWARD
    elif index <= 0:
        index = 0
        heading = FORWARD
    return replace(cursor, stop_index=index, heading=heading)


def pick_random_path(graph: MapGraph, from_vertex: int, rng: np.random.Generator) -> list[int]:
    """Choose a destination uniformly among reachable vertices; return the
    shortest path to it as vertex indices, source first.

    An isolated vertex has no destination; the empty list signals "stay and
    wait another period".
    """
    members = graph.component_members(from_vertex)
    if len(members) < 2:
        return []
    idx = int(rng.integers(0, len(members) - 1))
    dest = members[idx]
    if dest == from_vertex:
        dest = members[len(members) - 1]
    return graph.shortest_path(from_vertex, dest)


def advance(state: WaypointState, now: float, dt: float, profile: SpeedProfile,
            rng: np.random.Generator,
            pick_path: Callable[[np.random.Generator], list[GeoPoint]] | None = None) -> None:
    """Advance one tick: wait out pauses, draw new legs, move along the path.

    Movement covers ``leg_speed * dt`` meters, carrying leftover distance
    across waypoints within the tick. When the path runs out the node stops
    there and waits a uniform period before ``pick_path`` supplies the next
    leg (and a fresh uniform speed).
    """
    if dt <= 0:
        raise ValueError(f"dt must be positive, got {dt}")
    if not state.path:
        if now < state.wait_until:
            return
        if pick_path is None:
            return
        new_path = pick_path(rng)
        if not new_path:
            # nowhere to go; wait another period in place
            state.wait_until = now + rng.uniform(profile.wait_min, profile.wait_max)
            return
        state.path = list(new_path)
        state.leg_speed = rng.uniform(profile.min_speed, profile.max_speed)

    budget = state.leg_speed * dt
    x, y = state.position
    while state.path and budget > 0.0:
        tx, ty = state.path[0]
        seg = math.hypot(tx - x, ty - y)
        if seg > budget:
            frac = budget / seg
            x += (tx - x) * frac
            y += (ty - y) * frac
            budget = 0.0
        else:
            budget -= seg
            x, y = tx, ty
            state.path.pop(0)
    state.position = GeoPoint(x, y)
    if not state.path:
        # arrived: the rest of the tick is absorbed into the stop wait
        state.wait_until = now + rng.uniform(profile.wait_min, profile.wait_max)


class MapWalker:
    """Random-waypoint movement constrained to a road graph."""

    def __init__(self, graph: MapGraph, profile: SpeedProfile, rng: np.random.Generator):
        self.graph = graph
        self.profile = profile
        self.rng = rng
        self._vertex = int(rng.integers(0, len(graph.vertices)))
        self.state = WaypointState(position=graph.point(self._vertex), path=[])

    def _pick(self, rng: np.random.Generator) -> list[GeoPoint]:
        path = pick_random_path(self.graph, self._vertex, rng)
        if not path:
            return []
        self._vertex = path[-1]
        return [self.graph.point(v) for v in path[1:]]

    @property
    def position(self) -> GeoPoint:
        return self.state.position

    def step(self, now: float, dt: float) -> None:
        advance(self.state, now, dt, self.profile, self.rng, self._pick)


class RouteRunner:
    """Bus movement: ping-pong over a route's stops with dwell waits."""

    def __init__(self, cursor: RouteCursor, profile: SpeedProfile, rng: np.random.Generator):
        self.cursor = cursor
        self.profile = profile
        self.rng = rng
        self.state = WaypointState(position=cursor.route.stops[cursor.stop_index], path=[])

    def _pick(self, rng: np.random.Generator) -> list[GeoPoint]:
        self.cursor = next_route_leg(self.cursor)
        return [self.cursor.route.stops[self.cursor.stop_index]]

    @property
    def position(self) -> GeoPoint:
        return self.state.position

    def step(self, now: float, dt: float) -> None:
        advance(self.state, now, dt, self.profile, self.rng, self._pick)


class FixedPosition:
    """A mover that never moves; handy for pinned-node scenarios and tests."""

    def __init__(self, position: GeoPoint | tuple[float, float]):
        self.position = GeoPoint(*position)

    def step(self, now: float, dt: float) -> None:
        pass


def make_movers(kind: str, count: int, *, graph: MapGraph | None, route: Route | None,
                profile: SpeedProfile, reverse: bool,
                rngs: Sequence[np.random.Generator]) -> list[object]:
    """Build the movers for one node group."""
    if kind == "bus":
        if route is None:
            raise ValueError("bus group needs a route")
        cursors = place_nodes_on_route(route, count, reverse=reverse)
        return [RouteRunner(c, profile, rng) for c, rng in zip(cursors, rngs)]
    if graph is None:
        raise ValueError(f"{kind} group needs a map")
    return [MapWalker(graph, profile, rng) for rng in rngs]
