"""Independent reference implementations used as test oracles.

These were written before the code they check and stay frozen: when a
test disagrees with an oracle, the code under test is wrong until
proven otherwise. Everything here favors clarity over speed.
"""

from __future__ import annotations

import heapq
import math


def bfs4_steps(blocked, start, goal):
    """Uniform-cost step count on 4-adjacency, or None if unreachable.

    blocked is indexable as blocked[x][y] truthy; start/goal are (x, y)
    cells inside the array bounds.
    """
    nx = len(blocked)
    ny = len(blocked[0])
    if blocked[start[0]][start[1]] or blocked[goal[0]][goal[1]]:
        return None
    seen = {start}
    frontier = [start]
    steps = 0
    while frontier:
        if goal in seen:
            return steps
        nxt = []
        for (x, y) in frontier:
            for dx, dy in ((1, 0), (-1, 0), (0, 1), (0, -1)):
                n = (x + dx, y + dy)
                if (0 <= n[0] < nx and 0 <= n[1] < ny
                        and not blocked[n[0]][n[1]] and n not in seen):
                    seen.add(n)
                    nxt.append(n)
        frontier = nxt
        steps += 1
    return None


def dijkstra8_counts(blocked, start, goals):
    """(straight, diagonal) step counts of a shortest 8-adjacency path.

    Diagonal steps cost sqrt(2) relative to straight ones and are
    forbidden when both orthogonal neighbors of the move are blocked.
    Returns None when no goal is reachable. Out-of-bounds counts as
    blocked. The minimizing count pair is unique because sqrt(2) is
    irrational, so float comparisons cannot reorder distinct pairs at
    these path lengths.
    """
    nx = len(blocked)
    ny = len(blocked[0])

    def is_blocked(c):
        x, y = c
        return not (0 <= x < nx and 0 <= y < ny) or bool(blocked[x][y])

    goals = {g for g in goals if not is_blocked(g)}
    if is_blocked(start) or not goals:
        return None
    sqrt2 = math.sqrt(2)
    best: dict[tuple, tuple] = {start: (0, 0)}
    heap = [(0.0, start)]
    done = set()
    while heap:
        d, cur = heapq.heappop(heap)
        if cur in done:
            continue
        done.add(cur)
        if cur in goals:
            return best[cur]
        x, y = cur
        s_cnt, d_cnt = best[cur]
        for dx in (-1, 0, 1):
            for dy in (-1, 0, 1):
                if dx == 0 and dy == 0:
                    continue
                n = (x + dx, y + dy)
                if is_blocked(n):
                    continue
                diag = dx != 0 and dy != 0
                if diag and is_blocked((x + dx, y)) and is_blocked((x, y + dy)):
                    continue
                cand = (s_cnt + (0 if diag else 1), d_cnt + (1 if diag else 0))
                nd = cand[0] + cand[1] * sqrt2
                old = best.get(n)
                if old is None or nd < old[0] + old[1] * sqrt2 - 1e-12:
                    best[n] = cand
                    heapq.heappush(heap, (nd, n))
    return None


def dijkstra8_length(blocked, start, goals, cell_size):
    """Shortest 8-adjacency length in meters, matching the counting
    formula cell_size * (straight + diag * sqrt(2))."""
    counts = dijkstra8_counts(blocked, start, goals)
    if counts is None:
        return None
    s, d = counts
    return cell_size * (s + d * math.sqrt(2))


def raycast_inside(point, polygon):
    """Point-in-polygon by horizontal ray crossing count."""
    x, y = point
    inside = False
    n = len(polygon)
    for i in range(n):
        x1, y1 = polygon[i]
        x2, y2 = polygon[(i + 1) % n]
        if (y1 > y) != (y2 > y):
            x_cross = x1 + (y - y1) * (x2 - x1) / (y2 - y1)
            if x_cross > x:
                inside = not inside
    return inside


def seg_intersection_param(a1, a2, b1, b2):
    """Parameter t in [0, 1] along a1->a2 of the crossing with b1->b2,
    or None. Solved by Cramer's rule on t*A - u*B = (b1 - a1), giving
    t = (c x B)/(A x B) and u = (c x A)/(A x B); parallel gives None.
    """
    ax, ay = a2[0] - a1[0], a2[1] - a1[1]
    bx, by = b2[0] - b1[0], b2[1] - b1[1]
    den = ax * by - ay * bx
    if den == 0:
        return None
    cx, cy = b1[0] - a1[0], b1[1] - a1[1]
    t = (cx * by - cy * bx) / den
    u = (cx * ay - cy * ax) / den
    if -1e-12 <= t <= 1 + 1e-12 and -1e-12 <= u <= 1 + 1e-12:
        return min(max(t, 0.0), 1.0)
    return None


def cell_touches_segment(rect, seg):
    """Whether the closed rectangle meets the closed segment (shapely)."""
    from shapely.geometry import LineString, Point, box
    x1, y1, x2, y2 = rect
    r = box(x1, y1, x2, y2)
    if seg[0] == seg[1]:
        return r.intersects(Point(seg[0]))
    return r.intersects(LineString([seg[0], seg[1]]))


def relaxation_speed(t, v0, tau):
    """Closed-form free-agent speed under exponential relaxation."""
    return v0 * (1.0 - math.exp(-t / tau))
