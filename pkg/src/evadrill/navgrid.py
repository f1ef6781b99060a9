"""Occupancy grid over a floorplan and shortest-path routing on it.

Cells are squares of side cell_size anchored at the plan's bounding-box min
corner. A cell is blocked iff its closed square touches a wall segment or a
closed door. Exit cells carry their exit label. Grids are immutable; door
toggles return a new revision with only the door's cells recomputed.
"""

from __future__ import annotations

import heapq
import math
from dataclasses import dataclass, field

import numpy as np

from .floorplan import Door, Exit, FloorPlan, signage_terminus
from .geometry import Point, Segment, dist, seg_intersects_rect

SQRT2 = math.sqrt(2.0)

Cell = tuple[int, int]


class GridBuildError(Exception):
    """cell_size incompatible with the plan (an exit got no walkable cell)."""


class BlockedEndpointError(Exception):
    """Route endpoint sits in a blocked cell (distinct from unreachable)."""


class SignageError(Exception):
    """No signage node reachable from the start position."""


@dataclass(frozen=True)
class Route:
    cells: tuple[Cell, ...]
    length_m: float

    def points(self, grid: "NavGrid") -> list[Point]:
        return [grid.cell_center(c) for c in self.cells]


@dataclass(frozen=True)
class NavGrid:
    cell_size: float
    origin: Point
    nx: int
    ny: int
    blocked: np.ndarray                       # bool, shape (nx, ny)
    exit_cells: dict[Cell, str]
    door_cells: dict[str, tuple[Cell, ...]]   # door id -> overlapped cells
    door_states: dict[str, bool]              # door id -> open
    plan: FloorPlan = field(repr=False)

    # -- geometry of cells ------------------------------------------------

    def in_bounds_cell(self, c: Cell) -> bool:
        return 0 <= c[0] < self.nx and 0 <= c[1] < self.ny

    def in_bounds_point(self, p: Point) -> bool:
        ox, oy = self.origin
        return (ox <= p[0] <= ox + self.nx * self.cell_size
                and oy <= p[1] <= oy + self.ny * self.cell_size)

    def cell_of(self, p: Point) -> Cell:
        """Cell containing p; points on the max edge clamp to the last cell."""
        ox, oy = self.origin
        ix = min(self.nx - 1, max(0, int((p[0] - ox) / self.cell_size)))
        iy = min(self.ny - 1, max(0, int((p[1] - oy) / self.cell_size)))
        return (ix, iy)

    def cell_center(self, c: Cell) -> Point:
        ox, oy = self.origin
        return (ox + (c[0] + 0.5) * self.cell_size,
                oy + (c[1] + 0.5) * self.cell_size)

    def cell_rect(self, c: Cell) -> tuple[float, float, float, float]:
        ox, oy = self.origin
        x0 = ox + c[0] * self.cell_size
        y0 = oy + c[1] * self.cell_size
        return (x0, y0, x0 + self.cell_size, y0 + self.cell_size)

    def is_blocked(self, c: Cell) -> bool:
        return bool(self.blocked[c[0], c[1]])

    def is_walkable_point(self, p: Point) -> bool:
        return self.in_bounds_point(p) and not self.is_blocked(self.cell_of(p))

    def occupancy_codes(self) -> np.ndarray:
        """0 walkable, 1 blocked, 2 door, 3 exit. Deterministic byte-for-byte."""
        codes = np.zeros((self.nx, self.ny), dtype=np.uint8)
        codes[self.blocked] = 1
        for cells in self.door_cells.values():
            for c in cells:
                if codes[c] == 0:
                    codes[c] = 2
        for c in self.exit_cells:
            codes[c] = 3
        return codes

    def blocking_segments(self) -> list[Segment]:
        """Walls plus currently closed doors."""
        segs = list(self.plan.walls)
        for d in self.plan.doors:
            if not self.door_states.get(d.id, d.initially_open):
                segs.append(d.segment)
        return segs

    # -- door revisions ----------------------------------------------------

    def with_door(self, door_id: str, open_: bool) -> "NavGrid":
        """New grid revision with the door set; only its cells recomputed."""
        if door_id not in self.door_states:
            raise KeyError(f"unknown door {door_id!r}")
        if self.door_states[door_id] == open_:
            return self
        states = dict(self.door_states)
        states[door_id] = open_
        blocked = self.blocked.copy()
        closed_doors = [d for d in self.plan.doors if not states[d.id]]
        for c in self.door_cells[door_id]:
            rect = self.cell_rect(c)
            blocked[c] = _cell_blocked(rect, self.plan.walls, closed_doors)
        return NavGrid(
            cell_size=self.cell_size, origin=self.origin,
            nx=self.nx, ny=self.ny, blocked=blocked,
            exit_cells=self.exit_cells, door_cells=self.door_cells,
            door_states=states, plan=self.plan,
        )


def _cell_blocked(rect: tuple[float, float, float, float],
                  walls: tuple[Segment, ...], closed_doors: list[Door]) -> bool:
    x0, y0, x1, y1 = rect
    for w in walls:
        if seg_intersects_rect(w, x0, y0, x1, y1):
            return True
    for d in closed_doors:
        if seg_intersects_rect(d.segment, x0, y0, x1, y1):
            return True
    return False


def _cells_near_segment(seg: Segment, origin: Point, cell: float,
                        nx: int, ny: int) -> list[Cell]:
    (x1, y1), (x2, y2) = seg
    ox, oy = origin
    i0 = max(0, int(math.floor((min(x1, x2) - ox) / cell)) - 1)
    i1 = min(nx - 1, int(math.floor((max(x1, x2) - ox) / cell)) + 1)
    j0 = max(0, int(math.floor((min(y1, y2) - oy) / cell)) - 1)
    j1 = min(ny - 1, int(math.floor((max(y1, y2) - oy) / cell)) + 1)
    return [(i, j) for i in range(i0, i1 + 1) for j in range(j0, j1 + 1)]


def build_nav_grid(plan: FloorPlan, cell_size: float) -> NavGrid:
    """Rasterize the plan. Raises GridBuildError if cell_size leaves some
    exit without a walkable exit cell."""
    if cell_size <= 0:
        raise ValueError("cell_size must be > 0")
    xmin, ymin, xmax, ymax = plan.bounds()
    nx = max(1, int(math.ceil((xmax - xmin) / cell_size - 1e-9)))
    ny = max(1, int(math.ceil((ymax - ymin) / cell_size - 1e-9)))
    origin = (xmin, ymin)

    blocked = np.zeros((nx, ny), dtype=bool)
    door_states = {d.id: d.initially_open for d in plan.doors}
    closed_doors = [d for d in plan.doors if not d.initially_open]

    for seg in list(plan.walls) + [d.segment for d in closed_doors]:
        for c in _cells_near_segment(seg, origin, cell_size, nx, ny):
            if not blocked[c]:
                rect_x0 = origin[0] + c[0] * cell_size
                rect_y0 = origin[1] + c[1] * cell_size
                blocked[c] = seg_intersects_rect(
                    seg, rect_x0, rect_y0,
                    rect_x0 + cell_size, rect_y0 + cell_size)

    door_cells = {
        d.id: tuple(_cells_near_segment(d.segment, origin, cell_size, nx, ny))
        for d in plan.doors
    }

    exit_cells: dict[Cell, str] = {}
    for e in plan.exits:
        found = False
        for c in _cells_near_segment(e.segment, origin, cell_size, nx, ny):
            rect_x0 = origin[0] + c[0] * cell_size
            rect_y0 = origin[1] + c[1] * cell_size
            if blocked[c]:
                continue
            if seg_intersects_rect(e.segment, rect_x0, rect_y0,
                                   rect_x0 + cell_size, rect_y0 + cell_size):
                exit_cells.setdefault(c, e.label)
                found = True
        if not found:
            raise GridBuildError(
                f"cell_size {cell_size} leaves exit {e.label} with no walkable cell")

    return NavGrid(cell_size=cell_size, origin=origin, nx=nx, ny=ny,
                   blocked=blocked, exit_cells=exit_cells,
                   door_cells=door_cells, door_states=door_states, plan=plan)


# -- shortest paths ---------------------------------------------------------

_ORTHO = ((1, 0), (-1, 0), (0, 1), (0, -1))
_DIAG = ((1, 1), (1, -1), (-1, 1), (-1, -1))


def _neighbors(grid: NavGrid, c: Cell, diagonals: bool):
    cx, cy = c
    for dx, dy in _ORTHO:
        n = (cx + dx, cy + dy)
        if grid.in_bounds_cell(n) and not grid.is_blocked(n):
            yield n, False
    if diagonals:
        for dx, dy in _DIAG:
            n = (cx + dx, cy + dy)
            if not grid.in_bounds_cell(n) or grid.is_blocked(n):
                continue
            # Corner rule: the diagonal squeezes between its two orthogonal
            # neighbors; with both blocked there is no gap to pass through.
            a = (cx + dx, cy)
            b = (cx, cy + dy)
            a_blocked = not grid.in_bounds_cell(a) or grid.is_blocked(a)
            b_blocked = not grid.in_bounds_cell(b) or grid.is_blocked(b)
            if a_blocked and b_blocked:
                continue
            yield n, True


def _route_length(cell_size: float, cells: tuple[Cell, ...]) -> float:
    straight = 0
    diag = 0
    for a, b in zip(cells, cells[1:]):
        if a[0] != b[0] and a[1] != b[1]:
            diag += 1
        else:
            straight += 1
    return cell_size * (straight + diag * SQRT2)


def _astar(grid: NavGrid, start: Cell, goals: set[Cell],
           diagonals: bool) -> tuple[Cell, ...] | None:
    """A* from start to the nearest of goals. Euclidean-distance heuristic
    (admissible for both adjacency configs)."""
    cell = grid.cell_size

    goal_list = list(goals)

    def h(c: Cell) -> float:
        best = math.inf
        for g in goal_list:
            dx = abs(c[0] - g[0])
            dy = abs(c[1] - g[1])
            if diagonals:
                lo, hi = (dx, dy) if dx < dy else (dy, dx)
                d = (hi - lo) + lo * SQRT2
            else:
                d = dx + dy
            if d < best:
                best = d
        return best * cell

    counter = 0
    open_heap: list[tuple[float, int, Cell]] = [(h(start), counter, start)]
    g_score: dict[Cell, float] = {start: 0.0}
    came: dict[Cell, Cell] = {}
    closed: set[Cell] = set()

    while open_heap:
        _, _, cur = heapq.heappop(open_heap)
        if cur in closed:
            continue
        if cur in goals:
            path = [cur]
            while cur in came:
                cur = came[cur]
                path.append(cur)
            path.reverse()
            return tuple(path)
        closed.add(cur)
        for n, is_diag in _neighbors(grid, cur, diagonals):
            step = cell * SQRT2 if is_diag else cell
            tentative = g_score[cur] + step
            if tentative < g_score.get(n, math.inf):
                g_score[n] = tentative
                came[n] = cur
                counter += 1
                heapq.heappush(open_heap, (tentative + h(n), counter, n))
    return None


def plan_route(grid: NavGrid, from_pt: Point, to_pt: Point,
               diagonals: bool = True) -> Route | None:
    """Shortest route between two points, or None when unreachable.

    Raises BlockedEndpointError when either endpoint sits in a blocked cell
    and ValueError when it lies outside the grid.
    """
    for p, label in ((from_pt, "from"), (to_pt, "to")):
        if not grid.in_bounds_point(p):
            raise ValueError(f"{label} point {p} outside grid bounds")
    start = grid.cell_of(from_pt)
    goal = grid.cell_of(to_pt)
    for c, label in ((start, "from"), (goal, "to")):
        if grid.is_blocked(c):
            raise BlockedEndpointError(f"{label} point lies in a blocked cell {c}")
    cells = _astar(grid, start, {goal}, diagonals)
    if cells is None:
        return None
    return Route(cells=cells, length_m=_route_length(grid.cell_size, cells))


def route_to_exit(grid: NavGrid, from_pt: Point, label: str,
                  diagonals: bool = True) -> Route | None:
    """Shortest route from a point to any cell of the labeled exit."""
    if not grid.in_bounds_point(from_pt):
        raise ValueError(f"from point {from_pt} outside grid bounds")
    start = grid.cell_of(from_pt)
    if grid.is_blocked(start):
        raise BlockedEndpointError(f"from point lies in a blocked cell {start}")
    goals = {c for c, lab in grid.exit_cells.items() if lab == label}
    if not goals:
        raise KeyError(f"no exit cells labeled {label!r}")
    cells = _astar(grid, start, goals, diagonals)
    if cells is None:
        return None
    return Route(cells=cells, length_m=_route_length(grid.cell_size, cells))


def signage_route(plan: FloorPlan, grid: NavGrid, from_pt: Point,
                  diagonals: bool = True) -> Route:
    """Route a signage follower takes: walk to the nearest signage node, then
    follow the arrows to whatever exit they reach.

    The exit may differ from the globally nearest one; that divergence is the
    behavior being modeled. Raises SignageError when no node is reachable.
    """
    nodes = sorted(plan.signage_nodes(), key=lambda n: dist(from_pt, n))
    if not nodes:
        raise SignageError("plan has no signage nodes")
    first_route = None
    entry = None
    for node in nodes:
        try:
            r = plan_route(grid, from_pt, node, diagonals)
        except BlockedEndpointError:
            continue
        if r is not None:
            first_route, entry = r, node
            break
    if first_route is None:
        raise SignageError(f"no signage node reachable from {from_pt}")

    chain, _label = signage_terminus(plan, entry)
    cells = list(first_route.cells)
    pos = entry
    for nxt in chain[1:]:
        leg = plan_route(grid, pos, nxt, diagonals)
        if leg is None:
            raise SignageError(f"signage arrow {pos} -> {nxt} not walkable")
        # Legs share their joint cell; drop the duplicate.
        cells.extend(leg.cells[1:] if leg.cells[0] == cells[-1] else leg.cells)
        pos = nxt
    cells_t = tuple(cells)
    return Route(cells=cells_t, length_m=_route_length(grid.cell_size, cells_t))
