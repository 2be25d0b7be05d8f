"""Planar primitives for tiles: polygons whose edges are segments or arcs
of circles centred at the origin.

All quantities are float64. Primitive distances are exact up to rounding
(``EPS`` is the tolerance used in containment and tangency decisions).
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from functools import cached_property
from typing import Iterable, Sequence, Union

import numpy as np
import shapely
from shapely.geometry import Polygon as ShapelyPolygon

EPS = 1e-9
TWO_PI = 2.0 * math.pi

Point = tuple[float, float]


class GeometryError(ValueError):
    pass


@dataclass(frozen=True)
class Segment:
    a: Point
    b: Point


@dataclass(frozen=True)
class Arc:
    """Arc of the circle of ``radius`` about the origin, covering the angles
    ``start .. start + width`` counterclockwise (``0 < width < 2*pi``)."""

    radius: float
    start: float
    width: float

    def __post_init__(self) -> None:
        if self.radius <= 0:
            raise GeometryError("arc radius must be positive")
        object.__setattr__(self, "start", self.start % TWO_PI)

    @property
    def end(self) -> float:
        return self.start + self.width

    def point(self, theta: float) -> Point:
        return (self.radius * math.cos(theta), self.radius * math.sin(theta))

    def endpoints(self) -> tuple[Point, Point]:
        return self.point(self.start), self.point(self.end)

    def contains_angle(self, theta: float, tol: float = 1e-12) -> bool:
        off = (theta - self.start) % TWO_PI
        return off <= self.width + tol or off >= TWO_PI - tol

    def sample(self, n: int) -> np.ndarray:
        t = self.start + np.linspace(0.0, self.width, n)
        return self.radius * np.column_stack([np.cos(t), np.sin(t)])


Edge = Union[Segment, Arc]


@dataclass(frozen=True)
class ArcSpec:
    after_vertex: int
    radius: float
    ccw: bool = True


@dataclass(frozen=True)
class Polygon:
    """Simple counterclockwise region bounded by straight edges and
    origin-centred arcs. Edge ``i`` runs from ``vertices[i]`` to
    ``vertices[i+1]``; it is an arc iff an :class:`ArcSpec` names ``i``."""

    vertices: tuple[Point, ...]
    arcs: tuple[ArcSpec, ...] = ()

    def __post_init__(self) -> None:
        verts = tuple((float(x), float(y)) for x, y in self.vertices)
        object.__setattr__(self, "vertices", verts)
        arcs = tuple(a if isinstance(a, ArcSpec) else ArcSpec(*a) for a in self.arcs)
        object.__setattr__(self, "arcs", arcs)
        n = len(verts)
        if n < 3:
            raise GeometryError("polygon needs at least 3 edges")
        if not all(math.isfinite(c) for p in verts for c in p):
            raise GeometryError("non-finite vertex coordinate")
        for spec in arcs:
            if not 0 <= spec.after_vertex < n:
                raise GeometryError(f"arc index {spec.after_vertex} out of range")
            if spec.radius <= 0:
                raise GeometryError("arc radius must be positive")
            for p in (verts[spec.after_vertex], verts[(spec.after_vertex + 1) % n]):
                if abs(math.hypot(*p) - spec.radius) > 1e-9 * max(1.0, spec.radius):
                    raise GeometryError(f"vertex {p} is not on the arc of radius {spec.radius}")
        if self.area <= EPS * EPS:
            raise GeometryError("degenerate or clockwise polygon (area <= 0)")

    @cached_property
    def edges(self) -> tuple[Edge, ...]:
        arc_at = {a.after_vertex: a for a in self.arcs}
        n = len(self.vertices)
        out: list[Edge] = []
        for i in range(n):
            p, q = self.vertices[i], self.vertices[(i + 1) % n]
            spec = arc_at.get(i)
            if spec is None:
                out.append(Segment(p, q))
                continue
            tp, tq = math.atan2(p[1], p[0]), math.atan2(q[1], q[0])
            if spec.ccw:
                out.append(Arc(spec.radius, tp, (tq - tp) % TWO_PI))
            else:
                out.append(Arc(spec.radius, tq, (tp - tq) % TWO_PI))
        return tuple(out)

    @cached_property
    def area(self) -> float:
        # Green's theorem; an origin-centred arc contributes r^2 * (signed sweep) / 2.
        arc_at = {a.after_vertex: a for a in self.arcs}
        n = len(self.vertices)
        total = 0.0
        for i in range(n):
            (x1, y1), (x2, y2) = self.vertices[i], self.vertices[(i + 1) % n]
            spec = arc_at.get(i)
            if spec is None:
                total += x1 * y2 - x2 * y1
            else:
                t1, t2 = math.atan2(y1, x1), math.atan2(y2, x2)
                sweep = (t2 - t1) % TWO_PI if spec.ccw else -((t1 - t2) % TWO_PI)
                total += spec.radius**2 * sweep
        return 0.5 * total

    @property
    def has_arcs(self) -> bool:
        return bool(self.arcs)

    def translate(self, dx: float, dy: float) -> Polygon:
        if self.arcs and (dx or dy):
            raise GeometryError("arc polygons are tied to the origin and cannot be translated")
        return Polygon(tuple((x + dx, y + dy) for x, y in self.vertices), self.arcs)

    def scale(self, t: float) -> Polygon:
        arcs = tuple(ArcSpec(a.after_vertex, a.radius * t, a.ccw) for a in self.arcs)
        return Polygon(tuple((x * t, y * t) for x, y in self.vertices), arcs)

    def rotate(self, theta: float) -> Polygon:
        c, s = math.cos(theta), math.sin(theta)
        verts = tuple((c * x - s * y, s * x + c * y) for x, y in self.vertices)
        return Polygon(verts, self.arcs)

    def boundary_points(self, per_radian: float = 2000.0) -> np.ndarray:
        """Dense polyline approximation of the boundary (closed, no repeat)."""
        ccw = {a.after_vertex: a.ccw for a in self.arcs}
        chunks = []
        for i, e in enumerate(self.edges):
            if isinstance(e, Segment):
                chunks.append(np.array([e.a]))
                continue
            n = max(4, int(math.ceil(e.width * per_radian)))
            pts = e.sample(n + 1)
            if not ccw[i]:
                pts = pts[::-1]
            pts[0] = self.vertices[i]
            chunks.append(pts[:-1])
        return np.vstack(chunks)

    @cached_property
    def shape(self) -> ShapelyPolygon:
        return ShapelyPolygon(self.boundary_points())

    def to_json(self) -> dict:
        return {
            "vertices": [list(p) for p in self.vertices],
            "arcs": [
                {"after_vertex": a.after_vertex, "radius": a.radius, "ccw": a.ccw}
                for a in self.arcs
            ],
        }

    @classmethod
    def from_json(cls, data: dict) -> Polygon:
        arcs = tuple(
            ArcSpec(int(a["after_vertex"]), float(a["radius"]), bool(a.get("ccw", True)))
            for a in data.get("arcs", [])
        )
        return cls(tuple(tuple(p) for p in data["vertices"]), arcs)


def regular_polygon(n: int, circumradius: float, phase: float = 0.0,
                    center: Point = (0.0, 0.0)) -> Polygon:
    cx, cy = center
    return Polygon(tuple(
        (cx + circumradius * math.cos(phase + TWO_PI * i / n),
         cy + circumradius * math.sin(phase + TWO_PI * i / n))
        for i in range(n)
    ))


def annular_sector(inner: float, outer: float, theta0: float, theta1: float) -> Polygon:
    """Region ``inner <= r <= outer``, ``theta0 <= angle <= theta1`` (ccw)."""
    c0, s0 = math.cos(theta0), math.sin(theta0)
    c1, s1 = math.cos(theta1), math.sin(theta1)
    verts = ((inner * c0, inner * s0), (outer * c0, outer * s0),
             (outer * c1, outer * s1), (inner * c1, inner * s1))
    return Polygon(verts, (ArcSpec(1, outer, True), ArcSpec(3, inner, False)))


# --------------------------------------------------------------------------
# point / primitive distances


def _dist(p: Point, q: Point) -> float:
    return math.hypot(p[0] - q[0], p[1] - q[1])


def point_segment_distance(p: Point, a: Point, b: Point) -> float:
    dx, dy = b[0] - a[0], b[1] - a[1]
    ll = dx * dx + dy * dy
    if ll == 0.0:
        return _dist(p, a)
    t = ((p[0] - a[0]) * dx + (p[1] - a[1]) * dy) / ll
    t = min(1.0, max(0.0, t))
    return math.hypot(p[0] - a[0] - t * dx, p[1] - a[1] - t * dy)


def _orient(a: Point, b: Point, c: Point) -> float:
    return (b[0] - a[0]) * (c[1] - a[1]) - (b[1] - a[1]) * (c[0] - a[0])


def _segments_cross(a: Point, b: Point, c: Point, d: Point) -> bool:
    """Proper crossing only. Orientations within rounding noise count as
    zero, so (nearly) collinear or touching pairs fall through to the
    endpoint distances, which are exact for them."""
    tol = 1e-12 * (_dist(a, b) + _dist(c, d) + 1.0) ** 2
    d1, d2 = _orient(c, d, a), _orient(c, d, b)
    d3, d4 = _orient(a, b, c), _orient(a, b, d)
    return ((d1 > tol and d2 < -tol) or (d1 < -tol and d2 > tol)) and \
        ((d3 > tol and d4 < -tol) or (d3 < -tol and d4 > tol))


def segment_segment_distance(a: Point, b: Point, c: Point, d: Point) -> float:
    if _segments_cross(a, b, c, d):
        return 0.0
    return min(point_segment_distance(a, c, d), point_segment_distance(b, c, d),
               point_segment_distance(c, a, b), point_segment_distance(d, a, b))


def point_arc_distance(p: Point, arc: Arc) -> float:
    r = math.hypot(*p)
    if r > 0.0 and arc.contains_angle(math.atan2(p[1], p[0])):
        return abs(r - arc.radius)
    if r == 0.0:
        return arc.radius
    e0, e1 = arc.endpoints()
    return min(_dist(p, e0), _dist(p, e1))


def segment_arc_distance(a: Point, b: Point, arc: Arc) -> float:
    """Minimum distance between segment ``ab`` and an origin-centred arc."""
    dx, dy = b[0] - a[0], b[1] - a[1]
    ll = dx * dx + dy * dy
    R = arc.radius
    if ll > 0.0:
        # crossings of the supporting circle
        pb = a[0] * dx + a[1] * dy
        c = a[0] ** 2 + a[1] ** 2 - R * R
        disc = pb * pb - ll * c
        if disc >= 0.0:
            sq = math.sqrt(disc)
            for t in ((-pb - sq) / ll, (-pb + sq) / ll):
                if -1e-12 <= t <= 1 + 1e-12:
                    x, y = a[0] + t * dx, a[1] + t * dy
                    if arc.contains_angle(math.atan2(y, x)):
                        return 0.0
        # foot of the perpendicular from the origin
        t = -pb / ll
        if 0.0 < t < 1.0:
            x, y = a[0] + t * dx, a[1] + t * dy
            rf = math.hypot(x, y)
            if rf > 0.0 and arc.contains_angle(math.atan2(y, x)):
                cand = abs(rf - R)
            else:
                cand = math.inf
        else:
            cand = math.inf
    else:
        cand = math.inf
    e0, e1 = arc.endpoints()
    return min(cand, point_arc_distance(a, arc), point_arc_distance(b, arc),
               point_segment_distance(e0, a, b), point_segment_distance(e1, a, b))


def _spans_overlap(a1: Arc, a2: Arc) -> bool:
    return a1.contains_angle(a2.start) or a2.contains_angle(a1.start)


def arc_arc_distance(a1: Arc, a2: Arc) -> float:
    """Minimum distance between two origin-centred arcs."""
    if _spans_overlap(a1, a2):
        return abs(a1.radius - a2.radius)
    cands = [point_arc_distance(p, a2) for p in a1.endpoints()]
    cands += [point_arc_distance(p, a1) for p in a2.endpoints()]
    return min(cands)


def edge_distance(e1: Edge, e2: Edge) -> float:
    if isinstance(e1, Segment):
        if isinstance(e2, Segment):
            return segment_segment_distance(e1.a, e1.b, e2.a, e2.b)
        return segment_arc_distance(e1.a, e1.b, e2)
    if isinstance(e2, Segment):
        return segment_arc_distance(e2.a, e2.b, e1)
    return arc_arc_distance(e1, e2)


# farthest-point helpers for diameters

def _point_arc_farthest(p: Point, arc: Arc) -> float:
    r = math.hypot(*p)
    best = max(_dist(p, q) for q in arc.endpoints())
    if r > 0.0 and arc.contains_angle(math.atan2(p[1], p[0]) + math.pi):
        best = max(best, r + arc.radius)
    elif r == 0.0:
        best = max(best, arc.radius)
    return best


def _arc_arc_farthest(a1: Arc, a2: Arc) -> float:
    # theta1 - theta2 ranges over [a1.start - a2.end, a1.end - a2.start]
    lo = a1.start - a2.end
    hi = a1.end - a2.start
    k = math.ceil((lo - math.pi) / TWO_PI - 1e-12)
    if math.pi + k * TWO_PI <= hi + 1e-12:
        return a1.radius + a2.radius
    return max(_point_arc_farthest(p, a2) for p in a1.endpoints())


def diameter(p: Polygon) -> float:
    """Largest distance between two points of the closed region."""
    verts = np.asarray(p.vertices)
    diff = verts[:, None, :] - verts[None, :, :]
    best = float(np.sqrt((diff**2).sum(-1)).max())
    arcs = [e for e in p.edges if isinstance(e, Arc)]
    for arc in arcs:
        for v in p.vertices:
            best = max(best, _point_arc_farthest(v, arc))
    for i, a1 in enumerate(arcs):
        for a2 in arcs[i:]:
            best = max(best, _arc_arc_farthest(a1, a2))
    return best


def overlap_area(p1: Polygon, p2: Polygon) -> float:
    return float(p1.shape.intersection(p2.shape).area)


def _overlap_tol(p1: Polygon, p2: Polygon) -> float:
    return 1e-9 + 1e-6 * min(p1.area, p2.area)


def min_distance(p1: Polygon, p2: Polygon, check_overlap: bool = True) -> float:
    """Distance between two closed regions with disjoint interiors (0 if they touch)."""
    if check_overlap:
        # cheap reject before the polygon clipping
        if p1.shape.distance(p2.shape) <= 1e-6 and overlap_area(p1, p2) > _overlap_tol(p1, p2):
            raise GeometryError("polygons have overlapping interiors")
    best = math.inf
    for e1 in p1.edges:
        for e2 in p2.edges:
            d = edge_distance(e1, e2)
            if d < best:
                best = d
                if best <= 0.0:
                    return 0.0
    return best


def sample_boundary(p: Polygon, per_edge: int) -> np.ndarray:
    """``per_edge`` evenly spaced points on every edge (for brute-force checks)."""
    chunks = []
    t = np.linspace(0.0, 1.0, per_edge)
    for e in p.edges:
        if isinstance(e, Segment):
            a, b = np.array(e.a), np.array(e.b)
            chunks.append(a + t[:, None] * (b - a))
        else:
            chunks.append(e.sample(per_edge))
    return np.vstack(chunks)


def polygon_union_area(polys: Iterable[Polygon]) -> float:
    return float(shapely.union_all([p.shape for p in polys]).area)


def as_array(points: Sequence[Point]) -> np.ndarray:
    return np.asarray(points, dtype=float).reshape(-1, 2)
