"""Building floorplans for the drill: walls, doors, labeled exits, waypoints,
safe zones and the emergency-signage graph.

The document format is one JSON object (see docs/floorplan_schema.md). All
coordinates are meters, +x east, +y north.
"""

from __future__ import annotations

import hashlib
import json
import math
from dataclasses import dataclass, field
from importlib import resources

from .geometry import (
    Point,
    Segment,
    point_seg_distance,
    polygon_centroid,
    seg_midpoint,
)

EXIT_LABELS = ("A", "B", "C", "D")
REQUIRED_WAYPOINTS = ("E", "F", "L", "ES")

# A signage chain ends on an exit when its last node sits this close to the
# exit segment.
SIGN_EXIT_TOL = 0.5


class FloorplanError(Exception):
    """Base for floorplan document problems."""


class FloorplanSyntaxError(FloorplanError):
    def __init__(self, message: str, line: int | None = None):
        self.line = line
        if line is not None:
            message = f"line {line}: {message}"
        super().__init__(message)


class FloorplanSemanticError(FloorplanError):
    pass


@dataclass(frozen=True)
class Door:
    id: str
    segment: Segment
    initially_open: bool = True


@dataclass(frozen=True)
class Exit:
    label: str
    segment: Segment


@dataclass(frozen=True)
class SafeZone:
    label: str
    polygon: tuple[Point, ...]

    @property
    def centroid(self) -> Point:
        return polygon_centroid(list(self.polygon))


@dataclass(frozen=True)
class SignEdge:
    node: Point
    to: Point


@dataclass(frozen=True)
class FloorPlan:
    """Immutable after construction; safe to share across sessions."""

    name: str
    walls: tuple[Segment, ...]
    doors: tuple[Door, ...]
    exits: tuple[Exit, ...]
    waypoints: dict[str, Point]
    safe_zones: tuple[SafeZone, ...]
    signage: tuple[SignEdge, ...]

    def exit_by_label(self, label: str) -> Exit:
        for e in self.exits:
            if e.label == label:
                return e
        raise KeyError(f"no exit labeled {label!r}")

    def bounds(self) -> tuple[float, float, float, float]:
        """Bounding box (xmin, ymin, xmax, ymax) over all plan geometry."""
        pts: list[Point] = []
        for seg in self.walls:
            pts.extend(seg)
        for d in self.doors:
            pts.extend(d.segment)
        for e in self.exits:
            pts.extend(e.segment)
        pts.extend(self.waypoints.values())
        for z in self.safe_zones:
            pts.extend(z.polygon)
        for s in self.signage:
            pts.append(s.node)
            pts.append(s.to)
        if not pts:
            return (0.0, 0.0, 0.0, 0.0)
        xs = [p[0] for p in pts]
        ys = [p[1] for p in pts]
        return (min(xs), min(ys), max(xs), max(ys))

    def signage_nodes(self) -> list[Point]:
        """Unique signage nodes, in document order of first appearance."""
        seen: dict[Point, None] = {}
        for e in self.signage:
            seen.setdefault(e.node)
            seen.setdefault(e.to)
        return list(seen)

    def signage_successor(self, node: Point) -> Point | None:
        """Next node an arrow at `node` points to (first edge in document
        order when several leave the same node)."""
        for e in self.signage:
            if e.node == node:
                return e.to
        return None

    def digest(self) -> str:
        """Stable content hash; used to pin logs to the plan they ran on."""
        blob = json.dumps(plan_to_document(self), sort_keys=True,
                          separators=(",", ":"))
        return hashlib.sha256(blob.encode("utf-8")).hexdigest()[:16]


def _as_point(obj, where: str) -> Point:
    if (not isinstance(obj, (list, tuple)) or len(obj) != 2
            or not all(isinstance(v, (int, float)) for v in obj)):
        raise FloorplanSemanticError(f"{where}: expected a point [x, y], got {obj!r}")
    x, y = float(obj[0]), float(obj[1])
    if not (math.isfinite(x) and math.isfinite(y)):
        raise FloorplanSemanticError(f"{where}: coordinates must be finite")
    return (x, y)


def _as_segment(obj, where: str) -> Segment:
    if not isinstance(obj, (list, tuple)) or len(obj) != 2:
        raise FloorplanSemanticError(f"{where}: expected a segment [[x1,y1],[x2,y2]]")
    return (_as_point(obj[0], where), _as_point(obj[1], where))


def parse_floorplan(text: str) -> FloorPlan:
    """Parse a floorplan document into a validated FloorPlan.

    Raises FloorplanSyntaxError (with a line number) for malformed JSON and
    FloorplanSemanticError for invariant violations: missing waypoints,
    unknown or duplicate exit labels, dangling signage.
    """
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as exc:
        raise FloorplanSyntaxError(exc.msg, line=exc.lineno) from exc
    if not isinstance(doc, dict):
        raise FloorplanSemanticError("document root must be a JSON object")

    name = doc.get("name", "")
    if not isinstance(name, str):
        raise FloorplanSemanticError("name must be a string")

    walls = tuple(_as_segment(w, f"walls[{i}]")
                  for i, w in enumerate(doc.get("walls", [])))

    doors = []
    for i, d in enumerate(doc.get("doors", [])):
        if not isinstance(d, dict) or "id" not in d or "segment" not in d:
            raise FloorplanSemanticError(f"doors[{i}]: expected {{id, segment, initially_open}}")
        doors.append(Door(
            id=str(d["id"]),
            segment=_as_segment(d["segment"], f"doors[{i}].segment"),
            initially_open=bool(d.get("initially_open", True)),
        ))
    door_ids = [d.id for d in doors]
    if len(set(door_ids)) != len(door_ids):
        raise FloorplanSemanticError("door ids must be unique")

    exits = []
    for i, e in enumerate(doc.get("exits", [])):
        if not isinstance(e, dict) or "label" not in e or "segment" not in e:
            raise FloorplanSemanticError(f"exits[{i}]: expected {{label, segment}}")
        label = str(e["label"])
        if label not in EXIT_LABELS:
            raise FloorplanSemanticError(
                f"exits[{i}]: unknown exit label {label!r} (allowed: {', '.join(EXIT_LABELS)})")
        exits.append(Exit(label=label, segment=_as_segment(e["segment"], f"exits[{i}].segment")))
    labels = [e.label for e in exits]
    if len(set(labels)) != len(labels):
        raise FloorplanSemanticError("exit labels must be unique")

    raw_wp = doc.get("waypoints", {})
    if not isinstance(raw_wp, dict):
        raise FloorplanSemanticError("waypoints must be a mapping name -> point")
    waypoints = {str(k): _as_point(v, f"waypoints[{k}]") for k, v in raw_wp.items()}
    missing = [w for w in REQUIRED_WAYPOINTS if w not in waypoints]
    if missing:
        raise FloorplanSemanticError(f"missing waypoint(s): {', '.join(missing)}")

    zones = []
    for i, z in enumerate(doc.get("safe_zones", [])):
        if not isinstance(z, dict) or "label" not in z or "polygon" not in z:
            raise FloorplanSemanticError(f"safe_zones[{i}]: expected {{label, polygon}}")
        poly = tuple(_as_point(p, f"safe_zones[{i}].polygon[{j}]")
                     for j, p in enumerate(z["polygon"]))
        if len(poly) < 3:
            raise FloorplanSemanticError(f"safe_zones[{i}]: polygon needs >= 3 vertices")
        zones.append(SafeZone(label=str(z["label"]), polygon=poly))

    signage = []
    for i, s in enumerate(doc.get("signage", [])):
        if not isinstance(s, dict) or "node" not in s or "to" not in s:
            raise FloorplanSemanticError(f"signage[{i}]: expected {{node, to}}")
        signage.append(SignEdge(
            node=_as_point(s["node"], f"signage[{i}].node"),
            to=_as_point(s["to"], f"signage[{i}].to"),
        ))

    plan = FloorPlan(
        name=name,
        walls=walls,
        doors=tuple(doors),
        exits=tuple(exits),
        waypoints=waypoints,
        safe_zones=tuple(zones),
        signage=tuple(signage),
    )
    _check_signage(plan)
    return plan


def _check_signage(plan: FloorPlan) -> None:
    """Every signage chain must reach a node on an exit segment.

    An arrow chain follows the first outgoing edge of each node; chains must
    be finite (no cycles) and end within SIGN_EXIT_TOL of some exit.
    """
    for start in plan.signage_nodes():
        node = start
        seen = {node}
        while True:
            nxt = plan.signage_successor(node)
            if nxt is None:
                if not _near_exit(plan, node):
                    raise FloorplanSemanticError(
                        f"dangling signage: chain from {start} ends at {node}, "
                        "which is not on an exit segment and has no successor")
                break
            if nxt in seen:
                raise FloorplanSemanticError(
                    f"signage cycle detected starting from {start}")
            seen.add(nxt)
            node = nxt


def _near_exit(plan: FloorPlan, p: Point) -> bool:
    return any(point_seg_distance(p, e.segment) <= SIGN_EXIT_TOL
               for e in plan.exits)


def signage_terminus(plan: FloorPlan, node: Point) -> tuple[list[Point], str]:
    """Follow arrows from `node`; returns (chain of nodes, exit label reached).

    The plan is assumed validated, so the chain is finite and ends on an exit.
    """
    chain = [node]
    while True:
        nxt = plan.signage_successor(chain[-1])
        if nxt is None:
            break
        chain.append(nxt)
    end = chain[-1]
    best = min(plan.exits, key=lambda e: point_seg_distance(end, e.segment))
    return chain, best.label


def plan_to_document(plan: FloorPlan) -> dict:
    """Plan back to its plain-JSON document form (canonical field order)."""
    return {
        "name": plan.name,
        "walls": [[list(a), list(b)] for a, b in plan.walls],
        "doors": [{"id": d.id, "segment": [list(d.segment[0]), list(d.segment[1])],
                   "initially_open": d.initially_open} for d in plan.doors],
        "exits": [{"label": e.label, "segment": [list(e.segment[0]), list(e.segment[1])]}
                  for e in plan.exits],
        "waypoints": {k: list(v) for k, v in plan.waypoints.items()},
        "safe_zones": [{"label": z.label, "polygon": [list(p) for p in z.polygon]}
                       for z in plan.safe_zones],
        "signage": [{"node": list(s.node), "to": list(s.to)} for s in plan.signage],
    }


def load_floorplan(path: str) -> FloorPlan:
    with open(path, "r", encoding="utf-8") as fh:
        return parse_floorplan(fh.read())


def bundled_plan() -> FloorPlan:
    """The plan shipped with the package (data/eva_building.json)."""
    text = resources.files("evadrill.data").joinpath("eva_building.json").read_text("utf-8")
    return parse_floorplan(text)


def exit_target_point(plan: FloorPlan, label: str, inward: Point) -> Point:
    """A point just past the exit segment, seen from `inward`.

    Walking from inside the building to this point crosses the exit segment,
    which is what ends a drill.
    """
    seg = plan.exit_by_label(label).segment
    mid = seg_midpoint(seg)
    dx, dy = mid[0] - inward[0], mid[1] - inward[1]
    n = math.hypot(dx, dy)
    if n == 0.0:
        return mid
    push = 0.2
    return (mid[0] + dx / n * push, mid[1] + dy / n * push)
