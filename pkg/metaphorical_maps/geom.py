#!/usr/bin/env python3
"""
Geometric primitives

Polygon measures, convex hull, smallest enclosing circle, segment
predicates and their vectorized counterparts used by the simulation.
Polygons are sequences of (x, y) pairs without a repeated closing point.
"""

import math
import random
from typing import List, NamedTuple, Sequence, Tuple, Union

import numpy as np

from .validation import DegeneratePolygonError, format_error

# Relative tolerance of the orientation predicate
ORIENTATION_EPS = 1e-12
# Absolute slack when testing containment in a circle
CIRCLE_SLACK = 1e-12


class Point2(NamedTuple):
    x: float
    y: float


class Circle(NamedTuple):
    center: Point2
    radius: float

    def contains(self, p: Sequence[float], slack: float = CIRCLE_SLACK) -> bool:
        return math.hypot(p[0] - self.center.x, p[1] - self.center.y) <= self.radius + slack * (1.0 + self.radius)


PointLike = Union[Point2, Tuple[float, float], Sequence[float]]
Segment = Tuple[PointLike, PointLike]


def as_array(poly: Sequence[PointLike]) -> np.ndarray:
    """Coerce a point sequence to a float array of shape (n, 2)"""
    arr = np.asarray(poly, dtype=float)
    if arr.ndim != 2 or (arr.size and arr.shape[1] != 2):
        arr = arr.reshape(-1, 2)
    return arr


def signed_area(poly: Sequence[PointLike]) -> float:
    """Shoelace signed area, positive for counter-clockwise polygons"""
    pts = as_array(poly)
    if len(pts) < 3:
        raise DegeneratePolygonError(format_error('DEGENERATE_POLYGON', count=len(pts)))
    x, y = pts[:, 0], pts[:, 1]
    return 0.5 * float(np.dot(x, np.roll(y, -1)) - np.dot(np.roll(x, -1), y))


def polygon_area(poly: Sequence[PointLike]) -> float:
    """Absolute enclosed area, independent of orientation"""
    return abs(signed_area(poly))


def polygon_perimeter(poly: Sequence[PointLike]) -> float:
    pts = as_array(poly)
    return float(np.linalg.norm(np.roll(pts, -1, axis=0) - pts, axis=1).sum())


def polygon_centroid(poly: Sequence[PointLike]) -> Point2:
    """Area centroid; falls back to the vertex mean for zero-area input"""
    pts = as_array(poly)
    x, y = pts[:, 0], pts[:, 1]
    xn, yn = np.roll(x, -1), np.roll(y, -1)
    cross = x * yn - xn * y
    area = cross.sum() / 2.0
    if abs(area) < 1e-300:
        return Point2(float(x.mean()), float(y.mean()))
    cx = ((x + xn) * cross).sum() / (6.0 * area)
    cy = ((y + yn) * cross).sum() / (6.0 * area)
    return Point2(float(cx), float(cy))


def cross(o: PointLike, a: PointLike, b: PointLike) -> float:
    return (a[0] - o[0]) * (b[1] - o[1]) - (a[1] - o[1]) * (b[0] - o[0])


def orientation(a: PointLike, b: PointLike, c: PointLike) -> int:
    """Sign of the turn a -> b -> c with a scale-relative epsilon"""
    value = cross(a, b, c)
    scale = math.hypot(b[0] - a[0], b[1] - a[1]) * math.hypot(c[0] - a[0], c[1] - a[1])
    if abs(value) <= ORIENTATION_EPS * scale:
        return 0
    return 1 if value > 0 else -1


def convex_hull(points: Sequence[PointLike]) -> List[Point2]:
    """Counter-clockwise hull (monotone chain), collinear points dropped"""
    pts = sorted(set((float(p[0]), float(p[1])) for p in points))
    if len(pts) <= 2:
        return [Point2(*p) for p in pts]

    def half(seq):
        chain: List[Tuple[float, float]] = []
        for p in seq:
            while len(chain) >= 2 and orientation(chain[-2], chain[-1], p) <= 0:
                chain.pop()
            chain.append(p)
        return chain

    lower = half(pts)
    upper = half(reversed(pts))
    hull = lower[:-1] + upper[:-1]
    return [Point2(*p) for p in hull]


def _circle_two(a: PointLike, b: PointLike) -> Circle:
    cx, cy = (a[0] + b[0]) / 2.0, (a[1] + b[1]) / 2.0
    return Circle(Point2(cx, cy), math.hypot(a[0] - b[0], a[1] - b[1]) / 2.0)


def _circle_three(a: PointLike, b: PointLike, c: PointLike) -> Circle:
    d = 2.0 * (a[0] * (b[1] - c[1]) + b[0] * (c[1] - a[1]) + c[0] * (a[1] - b[1]))
    if abs(d) < 1e-300 or orientation(a, b, c) == 0:
        # collinear: the widest pair spans the circle
        pairs = [(a, b), (a, c), (b, c)]
        return max((_circle_two(p, q) for p, q in pairs), key=lambda circ: circ.radius)
    sa, sb, sc = a[0] ** 2 + a[1] ** 2, b[0] ** 2 + b[1] ** 2, c[0] ** 2 + c[1] ** 2
    ux = (sa * (b[1] - c[1]) + sb * (c[1] - a[1]) + sc * (a[1] - b[1])) / d
    uy = (sa * (c[0] - b[0]) + sb * (a[0] - c[0]) + sc * (b[0] - a[0])) / d
    return Circle(Point2(ux, uy), max(math.hypot(ux - p[0], uy - p[1]) for p in (a, b, c)))


def min_enclosing_circle(points: Sequence[PointLike], seed: int = 0) -> Circle:
    """
    Smallest circle containing all points (Welzl, iterative form).

    The shuffle uses a fixed seed so results are reproducible.
    """
    pts = [(float(p[0]), float(p[1])) for p in points]
    if not pts:
        raise DegeneratePolygonError(format_error('DEGENERATE_POLYGON', count=0))
    random.Random(seed).shuffle(pts)

    circle = Circle(Point2(*pts[0]), 0.0)
    for i in range(1, len(pts)):
        p = pts[i]
        if circle.contains(p):
            continue
        circle = Circle(Point2(*p), 0.0)
        for j in range(i):
            q = pts[j]
            if circle.contains(q):
                continue
            circle = _circle_two(p, q)
            for k in range(j):
                r = pts[k]
                if not circle.contains(r):
                    circle = _circle_three(p, q, r)
    return circle


def _strictly_inside_segment(p: PointLike, a: PointLike, b: PointLike) -> bool:
    """p collinear with a-b and strictly between the endpoints"""
    dx, dy = b[0] - a[0], b[1] - a[1]
    length_sq = dx * dx + dy * dy
    if length_sq == 0:
        return False
    t = ((p[0] - a[0]) * dx + (p[1] - a[1]) * dy) / length_sq
    tol = ORIENTATION_EPS
    if t <= tol or t >= 1.0 - tol:
        return False
    return (p[0], p[1]) != (a[0], a[1]) and (p[0], p[1]) != (b[0], b[1])


def segments_properly_intersect(s1: Segment, s2: Segment) -> bool:
    """
    True iff the interiors cross, or an endpoint of one segment lies in the
    interior of the other (collinear overlaps included). Touching at shared
    endpoints only does not count.
    """
    a, b = s1
    c, d = s2
    o1 = orientation(a, b, c)
    o2 = orientation(a, b, d)
    o3 = orientation(c, d, a)
    o4 = orientation(c, d, b)

    if o1 * o2 < 0 and o3 * o4 < 0:
        return True
    if o1 == 0 and _strictly_inside_segment(c, a, b):
        return True
    if o2 == 0 and _strictly_inside_segment(d, a, b):
        return True
    if o3 == 0 and _strictly_inside_segment(a, c, d):
        return True
    if o4 == 0 and _strictly_inside_segment(b, c, d):
        return True
    return False


def closest_point_on_segment(p: PointLike, s: Segment) -> Tuple[Point2, float]:
    """Projection of p clamped to the segment, and the Euclidean distance"""
    a, b = s
    dx, dy = b[0] - a[0], b[1] - a[1]
    length_sq = dx * dx + dy * dy
    if length_sq == 0:
        t = 0.0
    else:
        t = ((p[0] - a[0]) * dx + (p[1] - a[1]) * dy) / length_sq
        t = min(1.0, max(0.0, t))
    x = Point2(a[0] + t * dx, a[1] + t * dy)
    return x, math.hypot(p[0] - x.x, p[1] - x.y)


def point_in_polygon(p: PointLike, poly: Sequence[PointLike]) -> bool:
    """Even-odd ray casting; points on the boundary are reported outside"""
    pts = as_array(poly)
    n = len(pts)
    for i in range(n):
        a, b = pts[i], pts[(i + 1) % n]
        if orientation(a, b, p) == 0 and (
                _strictly_inside_segment(p, a, b) or tuple(p) in ((a[0], a[1]), (b[0], b[1]))):
            return False
    inside = False
    x, y = p[0], p[1]
    for i in range(n):
        x1, y1 = pts[i]
        x2, y2 = pts[(i + 1) % n]
        if (y1 > y) != (y2 > y):
            xi = x1 + (y - y1) * (x2 - x1) / (y2 - y1)
            if xi > x:
                inside = not inside
    return inside


def is_simple_polygon(poly: Sequence[PointLike]) -> bool:
    """No two non-adjacent sides intersect and no side touches another's interior"""
    pts = as_array(poly)
    n = len(pts)
    if n < 3:
        return False
    if len({(float(x), float(y)) for x, y in pts}) != n:
        return False
    starts = pts
    ends = np.roll(pts, -1, axis=0)
    hits = proper_intersection_matrix(starts, ends, starts, ends)
    return not bool(hits.any())


# ---------------------------------------------------------------------------
# Vectorized helpers
# ---------------------------------------------------------------------------

def _orient_sign(ax, ay, bx, by, cx, cy):
    value = (bx - ax) * (cy - ay) - (by - ay) * (cx - ax)
    scale = np.hypot(bx - ax, by - ay) * np.hypot(cx - ax, cy - ay)
    sign = np.sign(value)
    sign[np.abs(value) <= ORIENTATION_EPS * scale] = 0
    return sign


def _inside_param(px, py, ax, ay, bx, by):
    dx, dy = bx - ax, by - ay
    length_sq = dx * dx + dy * dy
    with np.errstate(divide='ignore', invalid='ignore'):
        t = ((px - ax) * dx + (py - ay) * dy) / length_sq
    t = np.where(length_sq > 0, t, -1.0)
    same_a = (px == ax) & (py == ay)
    same_b = (px == bx) & (py == by)
    return (t > ORIENTATION_EPS) & (t < 1.0 - ORIENTATION_EPS) & ~same_a & ~same_b


def proper_intersections(a: np.ndarray, b: np.ndarray,
                         c: np.ndarray, d: np.ndarray) -> np.ndarray:
    """
    Elementwise ``segments_properly_intersect`` for segments a-b and c-d.
    Inputs have a trailing axis of size 2 and broadcast against each other.
    """
    ax, ay = a[..., 0], a[..., 1]
    bx, by = b[..., 0], b[..., 1]
    cx, cy = c[..., 0], c[..., 1]
    dx, dy = d[..., 0], d[..., 1]

    o1 = _orient_sign(ax, ay, bx, by, cx, cy)
    o2 = _orient_sign(ax, ay, bx, by, dx, dy)
    o3 = _orient_sign(cx, cy, dx, dy, ax, ay)
    o4 = _orient_sign(cx, cy, dx, dy, bx, by)

    crossing = (o1 * o2 < 0) & (o3 * o4 < 0)
    touching = ((o1 == 0) & _inside_param(cx, cy, ax, ay, bx, by)) \
        | ((o2 == 0) & _inside_param(dx, dy, ax, ay, bx, by)) \
        | ((o3 == 0) & _inside_param(ax, ay, cx, cy, dx, dy)) \
        | ((o4 == 0) & _inside_param(bx, by, cx, cy, dx, dy))
    return crossing | touching


def proper_intersection_matrix(a: np.ndarray, b: np.ndarray,
                               c: np.ndarray, d: np.ndarray) -> np.ndarray:
    """
    Pairwise ``segments_properly_intersect`` between segments a[i]-b[i] and
    c[j]-d[j]; returns a boolean matrix of shape (len(a), len(c)).
    """
    if not len(a) or not len(c):
        return np.zeros((len(a), len(c)), dtype=bool)
    return proper_intersections(a[:, None, :], b[:, None, :], c[None, :, :], d[None, :, :])


def closest_points_on_segments(p: np.ndarray, a: np.ndarray,
                               b: np.ndarray) -> Tuple[np.ndarray, np.ndarray, np.ndarray]:
    """
    Closest points from every p[i] to every segment a[j]-b[j].

    Returns (points, distances, t) with shapes (P, S, 2), (P, S), (P, S);
    t is the clamped parameter along each segment.
    """
    seg = b - a
    length_sq = (seg ** 2).sum(axis=1)
    rel = p[:, None, :] - a[None, :, :]
    with np.errstate(divide='ignore', invalid='ignore'):
        t = (rel * seg[None, :, :]).sum(axis=2) / length_sq[None, :]
    t = np.where(length_sq[None, :] > 0, np.clip(t, 0.0, 1.0), 0.0)
    x = a[None, :, :] + t[:, :, None] * seg[None, :, :]
    dist = np.linalg.norm(p[:, None, :] - x, axis=2)
    return x, dist, t
