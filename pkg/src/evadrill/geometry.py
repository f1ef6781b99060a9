"""2D geometry primitives shared by the floorplan, scenario and dynamics code.

Points are (x, y) tuples in meters, +x east, +y north. Segments are
((x1, y1), (x2, y2)) tuples.
"""

from __future__ import annotations

import math

Point = tuple[float, float]
Vec = tuple[float, float]
Segment = tuple[Point, Point]


def dist(a: Point, b: Point) -> float:
    return math.hypot(b[0] - a[0], b[1] - a[1])


def seg_length(seg: Segment) -> float:
    return dist(seg[0], seg[1])


def seg_midpoint(seg: Segment) -> Point:
    (x1, y1), (x2, y2) = seg
    return ((x1 + x2) / 2.0, (y1 + y2) / 2.0)


def point_seg_distance(p: Point, seg: Segment) -> float:
    """Distance from p to the closest point of seg."""
    return dist(p, closest_point_on_seg(p, seg))


def closest_point_on_seg(p: Point, seg: Segment) -> Point:
    (ax, ay), (bx, by) = seg
    dx, dy = bx - ax, by - ay
    denom = dx * dx + dy * dy
    if denom == 0.0:
        return (ax, ay)
    t = ((p[0] - ax) * dx + (p[1] - ay) * dy) / denom
    t = min(1.0, max(0.0, t))
    return (ax + t * dx, ay + t * dy)


def seg_seg_intersection(a: Segment, b: Segment) -> float | None:
    """Parameter t in [0, 1] along segment a where it first meets segment b.

    Returns None when the segments do not touch. Endpoint contact counts.
    Collinear overlap returns the smallest t of the overlapping range.
    """
    (p0x, p0y), (p1x, p1y) = a
    (q0x, q0y), (q1x, q1y) = b
    rx, ry = p1x - p0x, p1y - p0y
    sx, sy = q1x - q0x, q1y - q0y
    denom = rx * sy - ry * sx
    qpx, qpy = q0x - p0x, q0y - p0y
    if denom == 0.0:
        # Parallel. Overlap only if also collinear.
        if qpx * ry - qpy * rx != 0.0:
            return None
        rr = rx * rx + ry * ry
        if rr == 0.0:
            # a is a point; touches b iff it lies on b
            return 0.0 if point_seg_distance(a[0], b) == 0.0 else None
        t0 = (qpx * rx + qpy * ry) / rr
        t1 = t0 + (sx * rx + sy * ry) / rr
        lo, hi = min(t0, t1), max(t0, t1)
        if hi < 0.0 or lo > 1.0:
            return None
        return max(0.0, lo)
    t = (qpx * sy - qpy * sx) / denom
    u = (qpx * ry - qpy * rx) / denom
    if 0.0 <= t <= 1.0 and 0.0 <= u <= 1.0:
        return t
    return None


def seg_intersects_rect(seg: Segment, xmin: float, ymin: float,
                        xmax: float, ymax: float) -> bool:
    """True iff seg touches the closed axis-aligned rectangle."""
    (x1, y1), (x2, y2) = seg
    # Quick reject on bounding boxes.
    if max(x1, x2) < xmin or min(x1, x2) > xmax:
        return False
    if max(y1, y2) < ymin or min(y1, y2) > ymax:
        return False
    # Either endpoint inside.
    if xmin <= x1 <= xmax and ymin <= y1 <= ymax:
        return True
    if xmin <= x2 <= xmax and ymin <= y2 <= ymax:
        return True
    # Otherwise the segment must cross one of the rectangle edges.
    corners = ((xmin, ymin), (xmax, ymin), (xmax, ymax), (xmin, ymax))
    edges = (
        (corners[0], corners[1]),
        (corners[1], corners[2]),
        (corners[2], corners[3]),
        (corners[3], corners[0]),
    )
    return any(seg_seg_intersection(seg, e) is not None for e in edges)


def point_in_convex_polygon(p: Point, poly: list[Point]) -> bool:
    """True iff p lies inside or on the boundary of the convex polygon.

    Vertices may wind either way; the sign test adapts to the winding.
    """
    n = len(poly)
    if n < 3:
        return False
    sign = 0
    px, py = p
    for i in range(n):
        ax, ay = poly[i]
        bx, by = poly[(i + 1) % n]
        cross = (bx - ax) * (py - ay) - (by - ay) * (px - ax)
        if cross == 0.0:
            continue
        s = 1 if cross > 0.0 else -1
        if sign == 0:
            sign = s
        elif s != sign:
            return False
    return True


def polygon_centroid(poly: list[Point]) -> Point:
    xs = sum(p[0] for p in poly) / len(poly)
    ys = sum(p[1] for p in poly) / len(poly)
    return (xs, ys)


def normalize(vx: float, vy: float) -> tuple[float, float]:
    """Unit vector along (vx, vy); (0, 0) stays (0, 0)."""
    n = math.hypot(vx, vy)
    if n == 0.0:
        return (0.0, 0.0)
    return (vx / n, vy / n)
