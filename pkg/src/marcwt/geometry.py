"""Two-user rate-region geometry: pentagons, convex hulls, areas, containment."""
from __future__ import annotations

import csv
import io
import math
from dataclasses import dataclass
from typing import Iterable, Sequence

import numpy as np

COLLINEAR_TOL = 1e-12

Point = tuple[float, float]


@dataclass(frozen=True)
class RatePentagon:
    """{R1, R2 >= 0, R1 <= r1_cap, R2 <= r2_cap, R1 + R2 <= sum_cap}."""

    r1_cap: float
    r2_cap: float
    sum_cap: float

    @property
    def caps(self) -> tuple[float, float, float]:
        return (self.r1_cap, self.r2_cap, self.sum_cap)

    @property
    def is_empty(self) -> bool:
        return min(self.caps) < 0

    def normalized(self) -> "RatePentagon":
        """Tighten each cap to the value actually attained by the polytope."""
        if self.is_empty:
            return self
        a = min(self.r1_cap, self.sum_cap)
        b = min(self.r2_cap, self.sum_cap)
        return RatePentagon(a, b, min(self.sum_cap, a + b))

    def contains_point(self, r1, r2, tol: float = 0.0):
        return (
            (np.asarray(r1) >= -tol)
            & (np.asarray(r2) >= -tol)
            & (np.asarray(r1) <= self.r1_cap + tol)
            & (np.asarray(r2) <= self.r2_cap + tol)
            & (np.asarray(r1) + np.asarray(r2) <= self.sum_cap + tol)
        )


@dataclass(frozen=True)
class RateRegion:
    """Convex polygon in the (R1, R2) plane.

    Vertices run counterclockwise from the origin: ``(0, 0)``, along the R1
    axis, over the upper-right boundary, and finish on the R2 axis. An empty
    vertex tuple is the empty region.
    """

    vertices: tuple[Point, ...]

    @classmethod
    def empty(cls) -> "RateRegion":
        return cls(())

    @property
    def is_empty(self) -> bool:
        return not self.vertices

    def as_array(self) -> np.ndarray:
        return np.asarray(self.vertices, dtype=float).reshape(-1, 2)

    def __len__(self) -> int:
        return len(self.vertices)


def pentagon_vertices(p: RatePentagon) -> RateRegion:
    """Vertex polygon of a pentagon; an empty region if any cap is negative."""
    if p.is_empty:
        return RateRegion.empty()
    a, b, c = p.normalized().caps
    candidates = [
        (0.0, 0.0),
        (min(a, c), 0.0),
        (a, c - a),
        (c - b, b),
        (0.0, min(b, c)),
    ]
    return _canonical(_monotone_chain(candidates))


def _cross(o: Point, a: Point, b: Point) -> float:
    return (a[0] - o[0]) * (b[1] - o[1]) - (a[1] - o[1]) * (b[0] - o[0])


def _monotone_chain(points: Iterable[Point]) -> list[Point]:
    raw = [(float(x) + 0.0, float(y) + 0.0) for x, y in points]
    if not raw:
        return []
    scale = max(max(abs(x), abs(y)) for x, y in raw) or 1.0
    tol = COLLINEAR_TOL * scale
    # Coordinates this close to an axis are on it; subnormal offsets only break the predicates.
    pts = sorted({(0.0 if abs(x) <= tol else x, 0.0 if abs(y) <= tol else y) for x, y in raw})
    if len(pts) <= 2:
        return pts

    def half(seq):
        out: list[Point] = []
        for p in seq:
            while len(out) >= 2 and _cross(out[-2], out[-1], p) <= 0:
                out.pop()
            out.append(p)
        return out

    lower = half(pts)
    upper = half(reversed(pts))
    hull = lower[:-1] + upper[:-1]
    if len(hull) == 2 and hull[0] == hull[1]:
        return hull[:1]
    return _drop_flat(hull, tol)


def _drop_flat(hull: list[Point], tol: float) -> list[Point]:
    """Remove vertices lying within ``tol`` of the segment joining their neighbours."""
    changed = True
    while changed and len(hull) > 2:
        changed = False
        for i in range(len(hull)):
            prev, cur, nxt = hull[i - 1], hull[i], hull[(i + 1) % len(hull)]
            if _point_segment_distance(cur, prev, nxt) <= tol:
                del hull[i]
                changed = True
                break
    if len(hull) == 2 and math.dist(hull[0], hull[1]) <= tol:
        return hull[:1]
    return hull


def _canonical(hull: list[Point]) -> RateRegion:
    if not hull:
        return RateRegion.empty()
    # Start at the vertex nearest the origin (the origin itself for valid regions).
    start = min(range(len(hull)), key=lambda i: (hull[i][0] + hull[i][1], hull[i][0]))
    ordered = hull[start:] + hull[:start]
    return RateRegion(tuple(ordered))


def hull_union(regions: Sequence[RateRegion | RatePentagon]) -> RateRegion:
    """Convex closure of a union of regions; empty members are skipped."""
    points: list[Point] = []
    for r in regions:
        if isinstance(r, RatePentagon):
            r = pentagon_vertices(r)
        points.extend(r.vertices)
    if not points:
        return RateRegion.empty()
    return _canonical(_monotone_chain(points))


def hull_points(points: np.ndarray) -> RateRegion:
    """Convex hull of an (n, 2) array of points."""
    points = np.asarray(points, dtype=float).reshape(-1, 2)
    if points.size == 0:
        return RateRegion.empty()
    return _canonical(_monotone_chain(map(tuple, np.unique(points, axis=0))))


def pentagon_corner_points(caps: np.ndarray) -> np.ndarray:
    """Corner points of many pentagons at once; ``caps`` has shape (n, 3).

    Rows with a negative cap contribute nothing. Used by the large parameter
    sweeps, where building one polygon per pentagon is wasteful.
    """
    caps = np.asarray(caps, dtype=float).reshape(-1, 3)
    caps = caps[np.all(caps >= 0, axis=1)]
    if caps.size == 0:
        return np.empty((0, 2))
    a = np.minimum(caps[:, 0], caps[:, 2])
    b = np.minimum(caps[:, 1], caps[:, 2])
    c = np.minimum(caps[:, 2], a + b)
    zeros = np.zeros_like(a)
    pts = np.concatenate(
        [
            np.stack([a, zeros], axis=1),
            np.stack([a, c - a], axis=1),
            np.stack([c - b, b], axis=1),
            np.stack([zeros, b], axis=1),
            np.zeros((1, 2)),
        ]
    )
    return pts


def area(r: RateRegion) -> float:
    """Shoelace area; zero for empty and degenerate regions."""
    if len(r) < 3:
        return 0.0
    v = r.as_array()
    x, y = v[:, 0], v[:, 1]
    return float(abs(0.5 * (np.dot(x, np.roll(y, -1)) - np.dot(y, np.roll(x, -1)))))


def _point_segment_distance(p, a, b) -> float:
    ax, ay = a
    dx, dy = b[0] - ax, b[1] - ay
    L2 = dx * dx + dy * dy
    t = 0.0 if L2 == 0 else max(0.0, min(1.0, ((p[0] - ax) * dx + (p[1] - ay) * dy) / L2))
    return math.hypot(p[0] - (ax + t * dx), p[1] - (ay + t * dy))


def distance_to_region(r: RateRegion, p: Point) -> float:
    """Euclidean distance from ``p`` to the convex region (0 inside)."""
    if r.is_empty:
        return math.inf
    v = r.vertices
    if len(v) == 1:
        return math.hypot(p[0] - v[0][0], p[1] - v[0][1])
    if len(v) >= 3 and all(_cross(v[i], v[(i + 1) % len(v)], p) >= 0 for i in range(len(v))):
        return 0.0
    n = len(v) if len(v) >= 3 else 1
    return min(_point_segment_distance(p, v[i], v[(i + 1) % len(v)]) for i in range(n))


def membership(r: RateRegion, points: np.ndarray, tol: float = 0.0) -> np.ndarray:
    """Vectorised point-in-region test for an (n, 2) array (boundary snap ``tol``)."""
    pts = np.asarray(points, dtype=float).reshape(-1, 2)
    if r.is_empty:
        return np.zeros(len(pts), dtype=bool)
    v = r.as_array()
    if len(v) < 3:
        return np.array([distance_to_region(r, tuple(p)) <= tol for p in pts], dtype=bool)
    inside = np.ones(len(pts), dtype=bool)
    for i in range(len(v)):
        a, b = v[i], v[(i + 1) % len(v)]
        edge = b - a
        length = float(np.hypot(*edge))
        cross = edge[0] * (pts[:, 1] - a[1]) - edge[1] * (pts[:, 0] - a[0])
        inside &= cross >= -tol * length
    return inside


def contains(outer: RateRegion, inner: RateRegion, tol: float = 0.0) -> bool:
    """True if every vertex of ``inner`` lies in ``outer`` dilated by ``tol``."""
    if inner.is_empty:
        return True
    if outer.is_empty:
        return False
    return all(distance_to_region(outer, p) <= tol for p in inner.vertices)


def support(r: RateRegion, direction: Sequence[float]) -> float:
    """max <v, direction> over the region; 0 for the empty region."""
    d = np.asarray(direction, dtype=float)
    if d.shape != (2,) or np.any(d < 0) or not np.any(d > 0):
        raise ValueError(f"direction must be non-zero with nonnegative components, got {direction}")
    if r.is_empty:
        return 0.0
    return float(np.max(r.as_array() @ d))


def first_quadrant_directions(n: int = 181) -> np.ndarray:
    theta = np.linspace(0.0, math.pi / 2, n)
    d = np.stack([np.cos(theta), np.sin(theta)], axis=1)
    d[np.abs(d) < 1e-15] = 0.0
    return d


def support_deficit(outer: RateRegion, inner: RateRegion, n_directions: int = 181) -> float:
    """Largest amount by which ``inner`` pokes out of ``outer``, over first-quadrant directions.

    Zero or negative means ``inner`` is dominated in every sampled direction.
    For the down-closed regions used here this is a containment test.
    """
    if inner.is_empty:
        return 0.0
    dirs = first_quadrant_directions(n_directions)
    vin = inner.as_array() @ dirs.T
    vout = outer.as_array() @ dirs.T if not outer.is_empty else np.zeros((1, len(dirs)))
    return float(np.max(vin.max(axis=0) - vout.max(axis=0)))


def union_envelope(pentagons: Sequence[RatePentagon], n_samples: int = 201) -> np.ndarray:
    """Upper boundary R2(R1) of the plain (not convexified) union of pentagons.

    Returns an (n_samples, 2) array; R2 is -inf above every pentagon's R1 reach.
    """
    live = [p.normalized() for p in pentagons if not p.is_empty]
    if not live:
        return np.empty((0, 2))
    r1_max = max(p.r1_cap for p in live)
    r1 = np.linspace(0.0, r1_max, n_samples)
    best = np.full(n_samples, -np.inf)
    for p in live:
        r2 = np.minimum(p.r2_cap, p.sum_cap - r1)
        r2 = np.where(r1 <= p.r1_cap, r2, -np.inf)
        best = np.maximum(best, r2)
    return np.stack([r1, best], axis=1)


def is_canonical(vertices: Sequence[Point], tol: float = 1e-9) -> bool:
    """Check the canonical form produced by :func:`hull_union`."""
    v = list(vertices)
    if not v:
        return True
    if any(x < -tol or y < -tol for x, y in v):
        return False
    if abs(v[0][0]) > tol or abs(v[0][1]) > tol:
        return False
    if len(v) < 3:
        return True
    n = len(v)
    return all(_cross(v[i], v[(i + 1) % n], v[(i + 2) % n]) > -tol for i in range(n))


def format_number(x: float) -> str:
    """Nine significant digits, lowercase exponent, no signed zero."""
    s = f"{x:.9g}"
    return "0" if s == "-0" else s


def region_to_csv(r: RateRegion) -> str:
    buf = io.StringIO()
    buf.write("R1_bits,R2_bits\n")
    for x, y in r.vertices:
        buf.write(f"{format_number(x)},{format_number(y)}\n")
    return buf.getvalue()


def region_from_csv(text: str) -> RateRegion:
    """Parse a region CSV; raises ValueError on a bad header or a non-canonical polygon."""
    rows = list(csv.reader(io.StringIO(text)))
    if not rows or [c.strip() for c in rows[0]] != ["R1_bits", "R2_bits"]:
        raise ValueError("region CSV must start with the header 'R1_bits,R2_bits'")
    verts = []
    for lineno, row in enumerate(rows[1:], start=2):
        if not row:
            continue
        if len(row) != 2:
            raise ValueError(f"line {lineno}: expected two columns, got {len(row)}")
        try:
            verts.append((float(row[0]), float(row[1])))
        except ValueError:
            raise ValueError(f"line {lineno}: non-numeric vertex {row}") from None
    if not is_canonical(verts):
        raise ValueError("vertex list is not a canonical counterclockwise convex polygon from the origin")
    return RateRegion(tuple(verts))
