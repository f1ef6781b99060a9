/** Test-only route planner for scripted sessions.
 *
 * Rasterizes the welcome plan the same way the server does (a cell is
 * blocked iff its closed square touches a wall or a closed door) and
 * finds waypoints with an 8-connected BFS. The product client never
 * plans routes; this exists so the end-to-end bot can steer.
 */

import { PlanDocument, Point, Segment } from "../src/protocol";

export interface Grid {
  cell: number;
  ox: number;
  oy: number;
  nx: number;
  ny: number;
  blocked: Uint8Array; // ix * ny + iy
}

/** Closed-rectangle overlap test; touching the boundary counts. */
export function segIntersectsRect(
  seg: Segment,
  x0: number,
  y0: number,
  x1: number,
  y1: number,
): boolean {
  const [[ax, ay], [bx, by]] = seg;
  if (Math.max(ax, bx) < x0 || Math.min(ax, bx) > x1) return false;
  if (Math.max(ay, by) < y0 || Math.min(ay, by) > y1) return false;
  // Liang-Barsky clip; a surviving [t0, t1] interval means overlap.
  const dx = bx - ax;
  const dy = by - ay;
  const p = [-dx, dx, -dy, dy];
  const q = [ax - x0, x1 - ax, ay - y0, y1 - ay];
  let t0 = 0;
  let t1 = 1;
  for (let i = 0; i < 4; i++) {
    if (p[i] === 0) {
      if (q[i] < 0) return false;
    } else {
      const r = q[i] / p[i];
      if (p[i] < 0) {
        if (r > t1) return false;
        if (r > t0) t0 = r;
      } else {
        if (r < t0) return false;
        if (r < t1) t1 = r;
      }
    }
  }
  return true;
}

export function buildGrid(plan: PlanDocument, cell = 0.5): Grid {
  const xs: number[] = [];
  const ys: number[] = [];
  const collect = (s: Segment) => {
    for (const [x, y] of s) {
      xs.push(x);
      ys.push(y);
    }
  };
  plan.walls.forEach(collect);
  plan.exits.forEach((e) => collect(e.segment));
  const ox = Math.min(...xs);
  const oy = Math.min(...ys);
  const nx = Math.max(1, Math.ceil((Math.max(...xs) - ox) / cell - 1e-9));
  const ny = Math.max(1, Math.ceil((Math.max(...ys) - oy) / cell - 1e-9));

  const segs: Segment[] = [...plan.walls];
  for (const d of plan.doors) {
    if (!d.initially_open) segs.push(d.segment);
  }
  const blocked = new Uint8Array(nx * ny);
  for (let ix = 0; ix < nx; ix++) {
    for (let iy = 0; iy < ny; iy++) {
      const x0 = ox + ix * cell;
      const y0 = oy + iy * cell;
      for (const s of segs) {
        if (segIntersectsRect(s, x0, y0, x0 + cell, y0 + cell)) {
          blocked[ix * ny + iy] = 1;
          break;
        }
      }
    }
  }
  return { cell, ox, oy, nx, ny, blocked };
}

export function cellOf(g: Grid, p: Point): [number, number] {
  const ix = Math.min(g.nx - 1, Math.max(0, Math.floor((p[0] - g.ox) / g.cell)));
  const iy = Math.min(g.ny - 1, Math.max(0, Math.floor((p[1] - g.oy) / g.cell)));
  return [ix, iy];
}

export function center(g: Grid, ix: number, iy: number): Point {
  return [g.ox + (ix + 0.5) * g.cell, g.oy + (iy + 0.5) * g.cell];
}

function isBlocked(g: Grid, ix: number, iy: number): boolean {
  if (ix < 0 || iy < 0 || ix >= g.nx || iy >= g.ny) return true;
  return g.blocked[ix * g.ny + iy] === 1;
}

/** Walkable cells whose center lies within radius of p. */
export function cellsNearPoint(
  g: Grid,
  p: Point,
  radius: number,
): Array<[number, number]> {
  const out: Array<[number, number]> = [];
  const r = Math.ceil(radius / g.cell) + 1;
  const [cx, cy] = cellOf(g, p);
  for (let ix = cx - r; ix <= cx + r; ix++) {
    for (let iy = cy - r; iy <= cy + r; iy++) {
      if (isBlocked(g, ix, iy)) continue;
      const [mx, my] = center(g, ix, iy);
      if (Math.hypot(mx - p[0], my - p[1]) <= radius) out.push([ix, iy]);
    }
  }
  return out;
}

/** Walkable cells whose square touches the labeled exit segment. */
export function exitCells(
  g: Grid,
  plan: PlanDocument,
  label: string,
): Array<[number, number]> {
  const exit = plan.exits.find((e) => e.label === label);
  if (!exit) return [];
  const out: Array<[number, number]> = [];
  for (let ix = 0; ix < g.nx; ix++) {
    for (let iy = 0; iy < g.ny; iy++) {
      if (isBlocked(g, ix, iy)) continue;
      const x0 = g.ox + ix * g.cell;
      const y0 = g.oy + iy * g.cell;
      if (segIntersectsRect(exit.segment, x0, y0, x0 + g.cell, y0 + g.cell)) {
        out.push([ix, iy]);
      }
    }
  }
  return out;
}

const ORTHO = [
  [1, 0],
  [-1, 0],
  [0, 1],
  [0, -1],
];
const DIAG = [
  [1, 1],
  [1, -1],
  [-1, 1],
  [-1, -1],
];

/** Cell-center waypoints from `from` to the nearest goal cell, start
 * excluded and goal included; empty when already on a goal, null when
 * unreachable. Diagonal steps squeezing between two blocked orthogonal
 * neighbors are forbidden. */
export function bfsPath(
  g: Grid,
  from: Point,
  goals: Array<[number, number]>,
): Point[] | null {
  const key = (ix: number, iy: number) => ix * g.ny + iy;
  const [sx, sy] = cellOf(g, from);
  const goalSet = new Set(goals.map(([ix, iy]) => key(ix, iy)));
  if (goalSet.size === 0) return null;
  if (goalSet.has(key(sx, sy))) return [];

  const prev = new Int32Array(g.nx * g.ny).fill(-2);
  prev[key(sx, sy)] = -1;
  let queue: Array<[number, number]> = [[sx, sy]];
  let found: [number, number] | null = null;

  while (queue.length > 0 && found === null) {
    const next: Array<[number, number]> = [];
    for (const [cx, cy] of queue) {
      const step = (nx: number, ny: number) => {
        if (isBlocked(g, nx, ny) || prev[key(nx, ny)] !== -2) return;
        prev[key(nx, ny)] = key(cx, cy);
        if (goalSet.has(key(nx, ny))) found = [nx, ny];
        next.push([nx, ny]);
      };
      for (const [dx, dy] of ORTHO) step(cx + dx, cy + dy);
      for (const [dx, dy] of DIAG) {
        const aBlocked = isBlocked(g, cx + dx, cy);
        const bBlocked = isBlocked(g, cx, cy + dy);
        if (aBlocked && bBlocked) continue;
        step(cx + dx, cy + dy);
      }
      if (found) break;
    }
    queue = next;
  }
  if (found === null) return null;

  const points: Point[] = [];
  let at = key(found[0], found[1]);
  while (at !== -1) {
    const ix = Math.floor(at / g.ny);
    const iy = at % g.ny;
    if (prev[at] === -1) break; // start cell stays out of the waypoint list
    points.push(center(g, ix, iy));
    at = prev[at];
  }
  points.reverse();
  return points;
}
