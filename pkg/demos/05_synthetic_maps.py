"""
How the shipped synthetic maps are built
========================================

The package ships a 2 km x 2 km grid map and eight overlapping bus routes
that all feed one terminal, standing in for real extracts at desk scale.
This script rebuilds equivalent files under demo_out/ so the construction
is reproducible and easy to tweak.
"""

from pathlib import Path

from dtnsim.geodata import GeoPoint, Polyline, write_wkt

SPACING = 200  # meters between grid lines and between route stops


def line(points):
    return Polyline(tuple(GeoPoint(float(x), float(y)) for x, y in points))


def densify(corners):
    """Expand corner points into stops every SPACING meters (axis-aligned)."""
    out = [corners[0]]
    for (x0, y0), (x1, y1) in zip(corners, corners[1:]):
        dx = 0 if x1 == x0 else (SPACING if x1 > x0 else -SPACING)
        dy = 0 if y1 == y0 else (SPACING if y1 > y0 else -SPACING)
        x, y = x0, y0
        while (x, y) != (x1, y1):
            x, y = x + dx, y + dy
            out.append((x, y))
    return out


out = Path("demo_out/maps")
out.mkdir(parents=True, exist_ok=True)

# --- the road grid: 11 horizontal + 11 vertical lines, shared intersections
n = 11
grid = [line([(c * SPACING, r * SPACING) for c in range(n)]) for r in range(n)]
grid += [line([(c * SPACING, r * SPACING) for r in range(n)]) for c in range(n)]
(out / "grid2km.wkt").write_text(write_wkt(grid))
print(f"grid2km.wkt: {len(grid)} linestrings, "
      f"{sum(l.length() for l in grid) / 1000:.0f} km of road")

# --- eight routes all reaching the terminal at (1000, 0); the shared
#     corridor along x=1000 is where buses from different routes meet
corners = {
    "route1": [(0, 200), (1000, 200), (1000, 0)],
    "route2": [(0, 400), (1000, 400), (1000, 0)],
    "route3": [(0, 600), (1000, 600), (1000, 0)],
    "route4": [(0, 800), (1000, 800), (1000, 0)],
    "route5": [(0, 1200), (1000, 1200), (1000, 0)],
    "route6": [(2000, 400), (1000, 400), (1000, 0)],
    "route7": [(2000, 1000), (1000, 1000), (1000, 0)],
    "route8": [(0, 1600), (1000, 1600), (1000, 0)],
}
for name, pts in corners.items():
    stops = densify(pts)
    (out / f"{name}.wkt").write_text(write_wkt([line(stops)]))
    print(f"{name}.wkt: {len(stops)} stops")

print(f"\nfiles under {out}/ (the shipped copies live in the package data)")
