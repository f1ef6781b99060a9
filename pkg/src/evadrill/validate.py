"""Plan validation: structural invariants plus navigability checks."""

from __future__ import annotations

from pathlib import Path

from .floorplan import (REQUIRED_WAYPOINTS, FloorPlan, FloorplanError,
                        load_floorplan)
from .navgrid import GridBuildError, build_nav_grid, plan_route, route_to_exit


def validate_plan(plan_or_path: FloorPlan | str | Path,
                  cell_size: float = 0.5) -> list[str]:
    """Violation messages for a plan; an empty list means the plan is ok.

    Parse and schema errors are reported as single violations; on a
    parsable plan the checks cover grid buildability, reachability of
    every exit and of the ward from the start point, and walkability of
    every signage leg.
    """
    if isinstance(plan_or_path, FloorPlan):
        plan = plan_or_path
    else:
        try:
            plan = load_floorplan(plan_or_path)
        except FloorplanError as exc:
            return [str(exc)]
        except OSError as exc:
            return [f"cannot read plan: {exc}"]

    violations: list[str] = []
    try:
        grid = build_nav_grid(plan, cell_size)
    except GridBuildError as exc:
        return [str(exc)]

    start = plan.waypoints.get("E")
    for wp in REQUIRED_WAYPOINTS:
        p = plan.waypoints.get(wp)
        if p is not None and not grid.is_walkable_point(p):
            violations.append(f"waypoint {wp} lies in a blocked cell")

    if start is not None and grid.is_walkable_point(start):
        for e in plan.exits:
            if route_to_exit(grid, start, e.label) is None:
                violations.append(f"exit {e.label} unreachable from E")
        ward = plan.waypoints.get("F")
        if ward is not None and grid.is_walkable_point(ward):
            if plan_route(grid, start, ward) is None:
                violations.append("ward waypoint F unreachable from E")

    for edge in plan.signage:
        if not grid.is_walkable_point(edge.node):
            violations.append(f"signage node {edge.node} in a blocked cell")
        elif not grid.is_walkable_point(edge.to):
            violations.append(
                f"signage target {edge.to} in a blocked cell")
        elif plan_route(grid, edge.node, edge.to) is None:
            violations.append(
                f"signage leg {edge.node} -> {edge.to} not walkable")
    return violations
