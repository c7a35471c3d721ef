"""Planar geometric primitives.

Orientation and in-circle decisions are exact (floating-point filter with a
rational fallback, via the selected kernel backend); the remaining
operations are ordinary double-precision constructions. The unit circle
radius 1 fixes the length scale used throughout the package.
"""

import math
from dataclasses import dataclass
from typing import NamedTuple, Sequence

from thuelab import backend

__all__ = [
    "Point",
    "Circle",
    "Segment",
    "ToleranceConfig",
    "DegenerateGeometryError",
    "orient2d",
    "incircle",
    "circumcircle",
    "dist_point_segment",
    "segments_intersect",
    "polygon_area",
    "angle_at",
]


class Point(NamedTuple):
    x: float
    y: float


class Circle(NamedTuple):
    center: Point
    radius: float


class Segment(NamedTuple):
    a: Point
    b: Point


class DegenerateGeometryError(ValueError):
    """Raised when an operation's input is geometrically degenerate."""


@dataclass(frozen=True)
class ToleranceConfig:
    """Numeric tolerances: coordinate equality, circumcenter merging and
    relative area comparison. Strictly positive, with eps_eq < eps_merge."""

    eps_eq: float = 1e-9
    eps_merge: float = 1e-7
    eps_area: float = 1e-8

    def __post_init__(self):
        if not (self.eps_eq > 0 and self.eps_merge > 0 and self.eps_area > 0):
            raise ValueError("tolerances must be strictly positive")
        if not self.eps_eq < self.eps_merge:
            raise ValueError("eps_eq must be smaller than eps_merge")


DEFAULT_TOL = ToleranceConfig()


def orient2d(a: Point, b: Point, c: Point) -> int:
    """Exact sign of the signed parallelogram area det(b - a, c - a).

    Returns +1 for a counterclockwise turn, -1 for clockwise, 0 for
    collinear points.
    """
    return backend.orient2d(a[0], a[1], b[0], b[1], c[0], c[1])


def incircle(a: Point, b: Point, c: Point, d: Point) -> int:
    """Exact circumcircle membership test.

    Returns +1 if d lies strictly inside the circumcircle of the triangle
    (a, b, c), 0 if the four points are cocircular, -1 if outside. The
    triangle may be given in either orientation; collinear (a, b, c) is an
    error because the circumcircle is undefined.
    """
    o = backend.orient2d(a[0], a[1], b[0], b[1], c[0], c[1])
    if o == 0:
        raise DegenerateGeometryError("collinear points have no circumcircle")
    s = backend.incircle(a[0], a[1], b[0], b[1], c[0], c[1], d[0], d[1])
    return s if o > 0 else -s


def circumcircle(a: Point, b: Point, c: Point) -> Circle:
    """Circle through three non-collinear points.

    The computation is done relative to `a` for accuracy; the center is
    equidistant from all three points up to roundoff.
    """
    if backend.orient2d(a[0], a[1], b[0], b[1], c[0], c[1]) == 0:
        raise DegenerateGeometryError("collinear points have no circumcircle")
    bx = b[0] - a[0]
    by = b[1] - a[1]
    cx = c[0] - a[0]
    cy = c[1] - a[1]
    d = 2.0 * (bx * cy - by * cx)
    b2 = bx * bx + by * by
    c2 = cx * cx + cy * cy
    ux = (cy * b2 - by * c2) / d
    uy = (bx * c2 - cx * b2) / d
    center = Point(a[0] + ux, a[1] + uy)
    return Circle(center, math.hypot(ux, uy))


def dist_point_segment(p: Point, s: Segment) -> float:
    """Euclidean distance from a point to a closed segment."""
    ax, ay = s.a
    bx, by = s.b
    dx = bx - ax
    dy = by - ay
    d2 = dx * dx + dy * dy
    if d2 == 0.0:
        return math.hypot(p[0] - ax, p[1] - ay)
    t = ((p[0] - ax) * dx + (p[1] - ay) * dy) / d2
    if t <= 0.0:
        return math.hypot(p[0] - ax, p[1] - ay)
    if t >= 1.0:
        return math.hypot(p[0] - bx, p[1] - by)
    return math.hypot(p[0] - (ax + t * dx), p[1] - (ay + t * dy))


def _on_segment_collinear(p: Point, a: Point, b: Point) -> bool:
    # p is known collinear with (a, b); test bounding-box containment.
    return (
        min(a[0], b[0]) <= p[0] <= max(a[0], b[0])
        and min(a[1], b[1]) <= p[1] <= max(a[1], b[1])
    )


def segments_intersect(s1: Segment, s2: Segment) -> bool:
    """Closed-segment intersection test, decided exactly via orientations."""
    p1, p2 = s1.a, s1.b
    p3, p4 = s2.a, s2.b
    d1 = orient2d(p3, p4, p1)
    d2 = orient2d(p3, p4, p2)
    d3 = orient2d(p1, p2, p3)
    d4 = orient2d(p1, p2, p4)
    if ((d1 > 0 and d2 < 0) or (d1 < 0 and d2 > 0)) and (
        (d3 > 0 and d4 < 0) or (d3 < 0 and d4 > 0)
    ):
        return True
    if d1 == 0 and _on_segment_collinear(p1, p3, p4):
        return True
    if d2 == 0 and _on_segment_collinear(p2, p3, p4):
        return True
    if d3 == 0 and _on_segment_collinear(p3, p1, p2):
        return True
    if d4 == 0 and _on_segment_collinear(p4, p1, p2):
        return True
    return False


def polygon_area(vertices: Sequence[Point]) -> float:
    """Shoelace area of a simple polygon; positive for CCW vertex order."""
    n = len(vertices)
    if n < 3:
        raise DegenerateGeometryError("polygon needs at least 3 vertices")
    acc = 0.0
    for i in range(n):
        x0, y0 = vertices[i]
        x1, y1 = vertices[(i + 1) % n]
        acc += x0 * y1 - x1 * y0
    return 0.5 * acc


def angle_at(vertex: Point, p: Point, q: Point) -> float:
    """Unsigned angle in (0, pi] between the rays vertex->p and vertex->q."""
    ux = p[0] - vertex[0]
    uy = p[1] - vertex[1]
    vx = q[0] - vertex[0]
    vy = q[1] - vertex[1]
    nu = math.hypot(ux, uy)
    nv = math.hypot(vx, vy)
    if nu == 0.0 or nv == 0.0:
        raise DegenerateGeometryError("angle undefined for coincident points")
    c = (ux * vx + uy * vy) / (nu * nv)
    c = max(-1.0, min(1.0, c))
    return math.acos(c)
