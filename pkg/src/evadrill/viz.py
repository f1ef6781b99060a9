"""Figure rendering: floorplan sketches and record-set summaries.

All figures render through the Agg backend straight to files, so they
work headless. Analysis functions stay figure-free; the CLI composes
them with this module when a --figure path is given.
"""

from __future__ import annotations

from pathlib import Path
from typing import Sequence

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt  # noqa: E402
from matplotlib.patches import Polygon  # noqa: E402

from .analysis import EXIT_NAMES, tabulate  # noqa: E402
from .floorplan import FloorPlan  # noqa: E402
from .navgrid import NavGrid, Route  # noqa: E402
from .telemetry import DecisionRecord  # noqa: E402


def plan_figure(plan: FloorPlan, path: str | Path,
                grid: NavGrid | None = None,
                routes: Sequence[Route] = ()) -> Path:
    """Top-down sketch of the plan; optional occupancy and routes."""
    fig, ax = plt.subplots(figsize=(10, 7.5))
    xmin, ymin, xmax, ymax = plan.bounds()

    if grid is not None:
        occ = grid.occupancy_codes()
        ax.imshow(occ.T != 1, origin="lower", cmap="gray", vmin=0, vmax=1.3,
                  extent=(grid.origin[0], grid.origin[0] + grid.nx * grid.cell_size,
                          grid.origin[1], grid.origin[1] + grid.ny * grid.cell_size),
                  alpha=0.25, interpolation="nearest")

    for zone in plan.safe_zones:
        ax.add_patch(Polygon(zone.polygon, closed=True, facecolor="#7fc97f",
                             alpha=0.35, edgecolor="none"))
        ax.annotate(zone.label, zone.centroid, color="#2d6a2d",
                    ha="center", va="center", fontsize=8)

    for (x1, y1), (x2, y2) in plan.walls:
        ax.plot([x1, x2], [y1, y2], color="black", linewidth=1.6)

    for door in plan.doors:
        (x1, y1), (x2, y2) = door.segment
        color = "#1f77b4" if door.initially_open else "#d62728"
        ax.plot([x1, x2], [y1, y2], color=color, linewidth=2.5,
                linestyle=":" if door.initially_open else "-")

    for e in plan.exits:
        (x1, y1), (x2, y2) = e.segment
        ax.plot([x1, x2], [y1, y2], color="#2ca02c", linewidth=4.0)
        ax.annotate(e.label, ((x1 + x2) / 2, (y1 + y2) / 2),
                    color="#2ca02c", fontsize=11, fontweight="bold",
                    xytext=(4, 4), textcoords="offset points")

    for name, p in plan.waypoints.items():
        ax.plot(*p, marker="o", markersize=5, color="#9467bd")
        ax.annotate(name, p, fontsize=9, color="#9467bd",
                    xytext=(5, 3), textcoords="offset points")

    for edge in plan.signage:
        ax.annotate("", xy=edge.to, xytext=edge.node,
                    arrowprops=dict(arrowstyle="->", color="#ff7f0e",
                                    linewidth=1.2))

    for route in routes:
        if grid is None:
            break
        pts = [grid.cell_center(c) for c in route.cells]
        ax.plot([p[0] for p in pts], [p[1] for p in pts],
                color="#e377c2", linewidth=1.2, alpha=0.9)

    ax.set_xlim(xmin - 1, xmax + 1)
    ax.set_ylim(ymin - 1, ymax + 1)
    ax.set_aspect("equal")
    ax.set_title(plan.name)
    ax.set_xlabel("x (m)")
    ax.set_ylabel("y (m)")
    out = Path(path)
    out.parent.mkdir(parents=True, exist_ok=True)
    fig.savefig(out, dpi=130, bbox_inches="tight")
    plt.close(fig)
    return out


def records_figure(records: Sequence[DecisionRecord],
                   path: str | Path) -> Path:
    """Four-panel summary: answers, exits, and the two time histograms."""
    tables = tabulate(list(records))
    fig, axes = plt.subplots(2, 2, figsize=(10, 7))

    ax = axes[0][0]
    keys = list("abcd")
    ax.bar(keys, [tables.table2[k] for k in keys], color="#1f77b4")
    ax.set_title("Alarm answers")
    ax.set_ylabel("subjects")

    ax = axes[0][1]
    labs = list("ABCD")
    ax.bar(labs, [tables.table3[k] for k in labs], color="#2ca02c")
    ax.set_xticks(range(4))
    ax.set_xticklabels([EXIT_NAMES[k] for k in labs], rotation=20,
                       fontsize=7, ha="right")
    ax.set_title("Exits used")

    ax = axes[1][0]
    ax.hist([r.pre_evac_time_s for r in records], bins=12, color="#ff7f0e")
    ax.set_title("Pre-evacuation time (s)")

    ax = axes[1][1]
    ax.hist([r.total_evac_time_s for r in records], bins=12,
            color="#9467bd")
    ax.set_title("Total evacuation time (s)")

    fig.suptitle(f"n = {tables.n}")
    fig.tight_layout()
    out = Path(path)
    out.parent.mkdir(parents=True, exist_ok=True)
    fig.savefig(out, dpi=130)
    plt.close(fig)
    return out
