"""Small 2-D geometry kernel: vectors, convex polygon clipping, line clipping.

Coordinates follow image conventions (x right, y down). Polygons are lists
of (x, y) tuples; "counter-clockwise" means positive signed (shoelace) area
in these raw coordinate values.
"""

from __future__ import annotations

import math

Point = tuple[float, float]
Polygon = list[Point]


def vsub(a: Point, b: Point) -> Point:
    return (a[0] - b[0], a[1] - b[1])


def vadd(a: Point, b: Point) -> Point:
    return (a[0] + b[0], a[1] + b[1])


def vscale(a: Point, s: float) -> Point:
    return (a[0] * s, a[1] * s)


def vnorm(a: Point) -> float:
    return math.hypot(a[0], a[1])


def vdist(a: Point, b: Point) -> float:
    return math.hypot(a[0] - b[0], a[1] - b[1])


def unit(a: Point) -> Point:
    n = vnorm(a)
    if n == 0.0:
        raise ValueError("cannot normalize zero vector")
    return (a[0] / n, a[1] / n)


def cross(a: Point, b: Point) -> float:
    return a[0] * b[1] - a[1] * b[0]


def dot(a: Point, b: Point) -> float:
    return a[0] * b[0] + a[1] * b[1]


def perp(a: Point) -> Point:
    """Rotate by +90 degrees."""
    return (-a[1], a[0])


def rotate(a: Point, angle_rad: float) -> Point:
    c, s = math.cos(angle_rad), math.sin(angle_rad)
    return (c * a[0] - s * a[1], s * a[0] + c * a[1])


def signed_area(poly: Polygon) -> float:
    """Shoelace area; positive for counter-clockwise vertex order."""
    n = len(poly)
    if n < 3:
        return 0.0
    acc = 0.0
    for i in range(n):
        x0, y0 = poly[i]
        x1, y1 = poly[(i + 1) % n]
        acc += x0 * y1 - x1 * y0
    return 0.5 * acc


def polygon_area(poly: Polygon) -> float:
    return abs(signed_area(poly))


def polygon_centroid(poly: Polygon) -> Point:
    """Area centroid; falls back to the vertex mean for degenerate polygons."""
    a = signed_area(poly)
    if abs(a) < 1e-12:
        n = len(poly)
        return (sum(p[0] for p in poly) / n, sum(p[1] for p in poly) / n)
    cx = cy = 0.0
    n = len(poly)
    for i in range(n):
        x0, y0 = poly[i]
        x1, y1 = poly[(i + 1) % n]
        w = x0 * y1 - x1 * y0
        cx += (x0 + x1) * w
        cy += (y0 + y1) * w
    return (cx / (6.0 * a), cy / (6.0 * a))


def ensure_ccw(poly: Polygon) -> Polygon:
    return poly if signed_area(poly) >= 0.0 else poly[::-1]


def clip_convex(subject: Polygon, clipper: Polygon) -> Polygon:
    """Intersection of two convex polygons (Sutherland-Hodgman half-plane clip).

    Both polygons must be convex and counter-clockwise. Returns the clipped
    vertex list, possibly empty.
    """
    output = list(subject)
    n = len(clipper)
    for i in range(n):
        if not output:
            return []
        a = clipper[i]
        b = clipper[(i + 1) % n]
        edge = vsub(b, a)
        new_output: Polygon = []
        prev = output[-1]
        prev_in = cross(edge, vsub(prev, a)) >= 0.0
        for cur in output:
            cur_in = cross(edge, vsub(cur, a)) >= 0.0
            if cur_in != prev_in:
                new_output.append(_line_intersection(prev, cur, a, b))
            if cur_in:
                new_output.append(cur)
            prev, prev_in = cur, cur_in
        output = new_output
    return output


def _line_intersection(p1: Point, p2: Point, q1: Point, q2: Point) -> Point:
    d1 = vsub(p2, p1)
    d2 = vsub(q2, q1)
    denom = cross(d1, d2)
    if denom == 0.0:
        return p2
    t = cross(vsub(q1, p1), d2) / denom
    return (p1[0] + t * d1[0], p1[1] + t * d1[1])


def clip_line_to_rect(
    point: Point, direction: Point, width: float, height: float
) -> tuple[Point, Point] | None:
    """Clip the infinite line through `point` along `direction` to
    [0, width] x [0, height].

    Returns the segment endpoints with the lexicographically smaller one
    first, or None when the line misses the rectangle.
    """
    dx, dy = direction
    tmin, tmax = -math.inf, math.inf
    for p, d, lo, hi in ((point[0], dx, 0.0, width), (point[1], dy, 0.0, height)):
        if d == 0.0:
            if p < lo or p > hi:
                return None
            continue
        t0 = (lo - p) / d
        t1 = (hi - p) / d
        if t0 > t1:
            t0, t1 = t1, t0
        tmin = max(tmin, t0)
        tmax = min(tmax, t1)
    if tmin > tmax or not math.isfinite(tmin) or not math.isfinite(tmax):
        return None
    p1 = (point[0] + tmin * dx, point[1] + tmin * dy)
    p2 = (point[0] + tmax * dx, point[1] + tmax * dy)
    return (p1, p2) if p1 <= p2 else (p2, p1)


def fold_axial(direction: Point) -> Point:
    """Canonicalize a line direction into the half-plane of angles [0, 180).

    Lines are undirected, so d and -d are the same axis; keep the
    representative with angle in [0, 180) measured from +x (the 180 case
    maps to 0).
    """
    x, y = direction
    if y < 0.0 or (y == 0.0 and x < 0.0):
        return (-x, -y)
    return (x, y)


def mean_direction(directions: list[Point]) -> Point | None:
    """Direction of the vector resultant of unit directions.

    Returns None when the resultant is (numerically) zero, i.e. the
    directions cancel out.
    """
    sx = sum(d[0] for d in directions)
    sy = sum(d[1] for d in directions)
    n = math.hypot(sx, sy)
    if n < 1e-9:
        return None
    return (sx / n, sy / n)
