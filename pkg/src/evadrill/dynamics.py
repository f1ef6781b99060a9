"""Agent movement: direct avatar kinematics and social-force dynamics.

The avatar moves at a fixed speed under keyboard/mouse input. Artificial
agents follow grid routes under a social-force model: a driving term that
relaxes velocity toward the desired speed along the route, plus
exponential repulsions from nearby agents and walls.
"""

from __future__ import annotations

import dataclasses
import hashlib
import math
from dataclasses import dataclass
from typing import Iterable, Sequence

from .geometry import (Point, Segment, Vec, closest_point_on_seg, dist,
                       normalize, point_seg_distance)
from .navgrid import NavGrid, Route

DEFAULT_RADIUS = 0.25
AVATAR_SPEED = 1.5
WALL_CUTOFF = 2.0


@dataclass(frozen=True)
class DynamicsParams:
    """Social-force parameters. Defaults are engineering choices."""

    tau: float = 0.5
    a_agent: float = 2.0
    b_agent: float = 0.3
    a_wall: float = 4.0
    b_wall: float = 0.2
    dt: float = 0.05
    speed_cap_factor: float = 1.25
    wheelchair_factor: float = 0.8

    def validate(self) -> None:
        for name in ("tau", "a_agent", "b_agent", "a_wall", "b_wall",
                     "dt", "speed_cap_factor", "wheelchair_factor"):
            v = getattr(self, name)
            if not (isinstance(v, (int, float)) and math.isfinite(v) and v > 0):
                raise ValueError(f"dynamics parameter {name} must be positive")
        if self.dt > 0.1:
            raise ValueError("dynamics tick dt must be <= 0.1 s")


@dataclass(frozen=True)
class InputCommand:
    forward: bool = False
    back: bool = False
    left: bool = False
    right: bool = False
    look_yaw: float = 0.0
    interact: bool = False


@dataclass(frozen=True)
class AgentState:
    id: int
    position: Point
    velocity: Vec = (0.0, 0.0)
    heading: float = 0.0
    radius: float = DEFAULT_RADIUS
    v0: float = AVATAR_SPEED
    pushing_wheelchair: bool = False
    route: Route | None = None
    route_idx: int = 0

    @property
    def speed(self) -> float:
        return math.hypot(*self.velocity)

    def effective_v0(self, params: DynamicsParams) -> float:
        if self.pushing_wheelchair:
            return self.v0 * params.wheelchair_factor
        return self.v0


def input_direction(cmd: InputCommand) -> Vec:
    """World-frame unit direction for the held keys, rotated by look_yaw.

    Opposed keys cancel; combined keys are normalized so diagonals give
    no speed boost. Returns (0, 0) when nothing effective is held.
    """
    f = (1.0 if cmd.forward else 0.0) - (1.0 if cmd.back else 0.0)
    l = (1.0 if cmd.left else 0.0) - (1.0 if cmd.right else 0.0)
    if f == 0.0 and l == 0.0:
        return (0.0, 0.0)
    c, s = math.cos(cmd.look_yaw), math.sin(cmd.look_yaw)
    wx = f * c - l * s
    wy = f * s + l * c
    return normalize(wx, wy)


def _slide(pos: Point, delta: Vec, grid: NavGrid) -> tuple[Point, Vec]:
    """Apply delta, clipping against blocked cells with axis sliding.

    Returns the new position and the delta actually applied.
    """
    nx = (pos[0] + delta[0], pos[1] + delta[1])
    if grid.is_walkable_point(nx):
        return nx, delta
    px = (pos[0] + delta[0], pos[1])
    if delta[0] != 0.0 and grid.is_walkable_point(px):
        return px, (delta[0], 0.0)
    py = (pos[0], pos[1] + delta[1])
    if delta[1] != 0.0 and grid.is_walkable_point(py):
        return py, (0.0, delta[1])
    return pos, (0.0, 0.0)


def step_avatar(state: AgentState, cmd: InputCommand, grid: NavGrid,
                dt: float, params: DynamicsParams = DynamicsParams()) -> AgentState:
    """Advance the avatar one tick of direct-input kinematics."""
    if dt <= 0:
        raise ValueError("dt must be > 0")
    e = input_direction(cmd)
    speed = state.effective_v0(params)
    delta = (e[0] * speed * dt, e[1] * speed * dt)
    pos, applied = _slide(state.position, delta, grid)
    vel = (applied[0] / dt, applied[1] / dt)
    return dataclasses.replace(
        state, position=pos, velocity=vel, heading=cmd.look_yaw)


def _pair_tiebreak(id_a: int, id_b: int) -> Vec:
    """Deterministic unit vector for a coincident agent pair.

    Antisymmetric by construction: the direction is derived from the
    sorted id pair and flipped for the higher id.
    """
    lo, hi = (id_a, id_b) if id_a <= id_b else (id_b, id_a)
    digest = hashlib.blake2b(f"{lo}:{hi}".encode(), digest_size=8).digest()
    angle = 2.0 * math.pi * int.from_bytes(digest, "big") / 2.0**64
    u = (math.cos(angle), math.sin(angle))
    if id_a == lo:
        return u
    return (-u[0], -u[1])


def route_direction(state: AgentState, grid: NavGrid) -> tuple[Vec, int]:
    """Unit direction toward the next unreached route cell.

    Returns ((0, 0), idx) when the agent has no route or has consumed it.
    Intermediate cells count as reached within one cell size; the final
    cell within half a cell, so the agent settles inside it.
    """
    if state.route is None:
        return (0.0, 0.0), state.route_idx
    cells = state.route.cells
    idx = state.route_idx
    last = len(cells) - 1
    while idx <= last:
        tol = grid.cell_size if idx < last else grid.cell_size * 0.5
        if dist(state.position, grid.cell_center(cells[idx])) > tol:
            break
        idx += 1
    if idx > last:
        return (0.0, 0.0), idx
    target = grid.cell_center(cells[idx])
    e = normalize(target[0] - state.position[0],
                  target[1] - state.position[1])
    return e, idx


def repulsion_accel(state: AgentState, neighbors: Iterable[AgentState],
                    walls: Iterable[Segment],
                    params: DynamicsParams) -> Vec:
    """Sum of exponential agent and wall repulsions on one agent."""
    ax = ay = 0.0
    for other in neighbors:
        if other.id == state.id:
            continue
        dx = state.position[0] - other.position[0]
        dy = state.position[1] - other.position[1]
        d = math.hypot(dx, dy)
        if d < 1e-12:
            ux, uy = _pair_tiebreak(state.id, other.id)
        else:
            ux, uy = dx / d, dy / d
        mag = params.a_agent * math.exp(
            (state.radius + other.radius - d) / params.b_agent)
        ax += mag * ux
        ay += mag * uy
    for seg in walls:
        d = point_seg_distance(state.position, seg)
        if d - state.radius > WALL_CUTOFF:
            continue
        if d < 1e-12:
            continue
        cx, cy = closest_point_on_seg(state.position, seg)
        ux, uy = (state.position[0] - cx) / d, (state.position[1] - cy) / d
        mag = params.a_wall * math.exp((state.radius - d) / params.b_wall)
        ax += mag * ux
        ay += mag * uy
    return ax, ay



def social_accel(state: AgentState, neighbors: Sequence[AgentState],
                 walls: Iterable[Segment], params: DynamicsParams,
                 grid: NavGrid | None = None) -> Vec:
    """Driving term plus repulsions: (v0·e - v)/tau + sum of repulsions.

    e is the unit direction to the next route cell (zero without a
    route), using `grid` to resolve cell centers when a route is set.
    """
    if grid is not None:
        e, _ = route_direction(state, grid)
    else:
        e = (0.0, 0.0)
    v0 = state.effective_v0(params)
    ax = (v0 * e[0] - state.velocity[0]) / params.tau
    ay = (v0 * e[1] - state.velocity[1]) / params.tau
    rx, ry = repulsion_accel(state, neighbors, walls, params)
    return (ax + rx, ay + ry)


class WallIndex:
    """Bucketed lookup of blocking segments near a query point."""

    def __init__(self, segments: Sequence[Segment],
                 bucket_size: float = 4.0, cutoff: float = WALL_CUTOFF):
        self.segments = tuple(segments)
        self.bucket_size = bucket_size
        self.cutoff = cutoff
        self._buckets: dict[tuple[int, int], list[Segment]] = {}
        pad = cutoff + 0.5
        for seg in self.segments:
            (x1, y1), (x2, y2) = seg
            bx0 = math.floor((min(x1, x2) - pad) / bucket_size)
            bx1 = math.floor((max(x1, x2) + pad) / bucket_size)
            by0 = math.floor((min(y1, y2) - pad) / bucket_size)
            by1 = math.floor((max(y1, y2) + pad) / bucket_size)
            for bx in range(bx0, bx1 + 1):
                for by in range(by0, by1 + 1):
                    self._buckets.setdefault((bx, by), []).append(seg)

    @classmethod
    def from_grid(cls, grid: NavGrid, **kw) -> "WallIndex":
        return cls(grid.blocking_segments(), **kw)

    def near(self, p: Point) -> Sequence[Segment]:
        key = (math.floor(p[0] / self.bucket_size),
               math.floor(p[1] / self.bucket_size))
        return self._buckets.get(key, ())


def integrate(agents: Sequence[AgentState], grid: NavGrid,
              params: DynamicsParams,
              wall_index: WallIndex | None = None) -> list[AgentState]:
    """Advance all agents one tick. Pure: returns new states.

    The driving term is applied as an exact exponential relaxation of
    velocity toward v0·e (so free-agent speed matches the closed-form
    relaxation curve at any dt); repulsion accelerations are applied as
    explicit-Euler impulses. Speed is capped, the position update is
    semi-implicit, and positions are clipped to walkable cells.
    """
    params.validate()
    if not agents:
        return []
    if wall_index is None:
        wall_index = WallIndex.from_grid(grid)
    beta = math.exp(-params.dt / params.tau)
    out = []
    for ag in agents:
        e, idx = route_direction(ag, grid)
        rx, ry = repulsion_accel(ag, agents, wall_index.near(ag.position),
                                 params)
        v0 = ag.effective_v0(params)
        vx = beta * ag.velocity[0] + (1.0 - beta) * v0 * e[0] + rx * params.dt
        vy = beta * ag.velocity[1] + (1.0 - beta) * v0 * e[1] + ry * params.dt
        cap = params.speed_cap_factor * ag.v0
        sp = math.hypot(vx, vy)
        if sp > cap:
            vx, vy = vx * cap / sp, vy * cap / sp
        full = (vx * params.dt, vy * params.dt)
        pos, applied = _slide(ag.position, full, grid)
        if applied != full:
            # blocked axes lose their velocity so agents stop ramming
            if applied[0] == 0.0:
                vx = 0.0
            if applied[1] == 0.0:
                vy = 0.0
        heading = ag.heading
        if math.hypot(vx, vy) > 1e-9:
            heading = math.atan2(vy, vx)
        out.append(dataclasses.replace(
            ag, position=pos, velocity=(vx, vy), heading=heading,
            route_idx=idx))
    return out
