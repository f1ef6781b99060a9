/** Top-down canvas renderer. World units are meters, +y north; the
 * canvas y axis is flipped so north points up on screen. Everything
 * drawn about the avatar and wheelchair comes from the latest server
 * snapshot only. No route hints or timers are ever drawn.
 */

import { PlanDocument, Point, SnapshotFrame, Phase } from "./protocol";

export class Camera {
  cx = 0;
  cy = 0;
  scale = 20; // pixels per meter

  fit(plan: PlanDocument, width: number, height: number): void {
    let xmin = Infinity, ymin = Infinity, xmax = -Infinity, ymax = -Infinity;
    const take = (p: Point) => {
      xmin = Math.min(xmin, p[0]); xmax = Math.max(xmax, p[0]);
      ymin = Math.min(ymin, p[1]); ymax = Math.max(ymax, p[1]);
    };
    for (const [a, b] of plan.walls) { take(a); take(b); }
    for (const e of plan.exits) { take(e.segment[0]); take(e.segment[1]); }
    if (!isFinite(xmin)) { xmin = 0; ymin = 0; xmax = 10; ymax = 10; }
    this.cx = (xmin + xmax) / 2;
    this.cy = (ymin + ymax) / 2;
    const pad = 1.5;
    this.scale = Math.min(
      width / (xmax - xmin + 2 * pad),
      height / (ymax - ymin + 2 * pad),
    );
  }

  toScreen(p: Point, width: number, height: number): [number, number] {
    return [
      width / 2 + (p[0] - this.cx) * this.scale,
      height / 2 - (p[1] - this.cy) * this.scale,
    ];
  }

  zoom(factor: number): void {
    this.scale = Math.max(4, Math.min(120, this.scale * factor));
  }

  pan(dxMeters: number, dyMeters: number): void {
    this.cx += dxMeters;
    this.cy += dyMeters;
  }
}

export const PHASE_BANNERS: Record<Phase, string> = {
  Briefing: "Briefing",
  EscortToWard: "Take the patient to the ward",
  AlarmQuestion: "Answer the question",
  Evacuation: "Evacuate the building",
  Finished: "Drill complete",
};

interface Theme {
  bg: string; wall: string; doorOpen: string; doorClosed: string;
  exit: string; zone: string; sign: string; avatar: string; chair: string;
  text: string;
}

const THEME: Theme = {
  bg: "#10141a",
  wall: "#c8d0dc",
  doorOpen: "#4aa3ff",
  doorClosed: "#ff5d5d",
  exit: "#37d67a",
  zone: "rgba(55, 214, 122, 0.12)",
  sign: "#2f9e5f",
  avatar: "#ffd23f",
  chair: "#b08cff",
  text: "#e8edf4",
};

export function drawScene(
  ctx: CanvasRenderingContext2D,
  cam: Camera,
  plan: PlanDocument,
  snap: SnapshotFrame | null,
  width: number,
  height: number,
): void {
  ctx.fillStyle = THEME.bg;
  ctx.fillRect(0, 0, width, height);
  const S = (p: Point) => cam.toScreen(p, width, height);

  for (const z of plan.safe_zones) {
    ctx.fillStyle = THEME.zone;
    ctx.beginPath();
    z.polygon.forEach((p, i) => {
      const [x, y] = S(p);
      if (i === 0) ctx.moveTo(x, y); else ctx.lineTo(x, y);
    });
    ctx.closePath();
    ctx.fill();
    const c = centroid(z.polygon);
    label(ctx, S(c), z.label, THEME.sign, 11);
  }

  ctx.strokeStyle = THEME.wall;
  ctx.lineWidth = 2;
  ctx.beginPath();
  for (const [a, b] of plan.walls) {
    const [x1, y1] = S(a);
    const [x2, y2] = S(b);
    ctx.moveTo(x1, y1);
    ctx.lineTo(x2, y2);
  }
  ctx.stroke();

  const doorStates = snap?.doors ?? {};
  for (const d of plan.doors) {
    const open = doorStates[d.id] ?? d.initially_open;
    ctx.strokeStyle = open ? THEME.doorOpen : THEME.doorClosed;
    ctx.lineWidth = open ? 2 : 4;
    ctx.setLineDash(open ? [5, 4] : []);
    seg(ctx, S(d.segment[0]), S(d.segment[1]));
    ctx.setLineDash([]);
  }

  for (const e of plan.exits) {
    ctx.strokeStyle = THEME.exit;
    ctx.lineWidth = 5;
    seg(ctx, S(e.segment[0]), S(e.segment[1]));
    const mid: Point = [
      (e.segment[0][0] + e.segment[1][0]) / 2,
      (e.segment[0][1] + e.segment[1][1]) / 2,
    ];
    label(ctx, S(mid), e.label, THEME.exit, 13);
  }

  // static green signage, part of the building itself
  for (const s of plan.signage) {
    arrow(ctx, S(s.node), S(s.to), THEME.sign);
  }

  const ward = plan.waypoints["F"];
  if (ward) label(ctx, S(ward), "ward", THEME.text, 11);

  if (snap) {
    const [wx, wy] = S([snap.wheelchair.x, snap.wheelchair.y]);
    if (snap.wheelchair.attached) {
      const [ax, ay] = S([snap.avatar.x, snap.avatar.y]);
      ctx.strokeStyle = THEME.chair;
      ctx.lineWidth = 1;
      seg(ctx, [ax, ay], [wx, wy]);
    }
    ctx.fillStyle = THEME.chair;
    ctx.fillRect(wx - 5, wy - 5, 10, 10);

    const [ax, ay] = S([snap.avatar.x, snap.avatar.y]);
    const r = Math.max(4, 0.35 * cam.scale);
    ctx.fillStyle = THEME.avatar;
    ctx.beginPath();
    ctx.arc(ax, ay, r, 0, 2 * Math.PI);
    ctx.fill();
    ctx.strokeStyle = THEME.bg;
    ctx.lineWidth = 2;
    seg(ctx, [ax, ay], [
      ax + 1.8 * r * Math.cos(snap.avatar.yaw),
      ay - 1.8 * r * Math.sin(snap.avatar.yaw),
    ]);
  }

  const phase: Phase = snap ? snap.phase : "Briefing";
  ctx.fillStyle = THEME.text;
  ctx.font = "bold 16px system-ui, sans-serif";
  ctx.textAlign = "left";
  ctx.textBaseline = "top";
  ctx.fillText(PHASE_BANNERS[phase], 12, 10);
  if (snap) {
    ctx.font = "12px system-ui, sans-serif";
    ctx.fillText(`t = ${snap.t.toFixed(1)} s`, 12, 32);
  }
}

function seg(ctx: CanvasRenderingContext2D, a: [number, number], b: [number, number]): void {
  ctx.beginPath();
  ctx.moveTo(a[0], a[1]);
  ctx.lineTo(b[0], b[1]);
  ctx.stroke();
}

function arrow(ctx: CanvasRenderingContext2D, from: [number, number], to: [number, number], color: string): void {
  const dx = to[0] - from[0];
  const dy = to[1] - from[1];
  const len = Math.hypot(dx, dy);
  if (len < 1e-6) return;
  const ux = dx / len;
  const uy = dy / len;
  const hx = from[0] + ux * Math.min(14, len);
  const hy = from[1] + uy * Math.min(14, len);
  ctx.strokeStyle = color;
  ctx.lineWidth = 1.5;
  seg(ctx, from, [hx, hy]);
  ctx.beginPath();
  ctx.moveTo(hx, hy);
  ctx.lineTo(hx - ux * 5 - uy * 3, hy - uy * 5 + ux * 3);
  ctx.lineTo(hx - ux * 5 + uy * 3, hy - uy * 5 - ux * 3);
  ctx.closePath();
  ctx.fillStyle = color;
  ctx.fill();
}

function label(ctx: CanvasRenderingContext2D, at: [number, number], text: string, color: string, size: number): void {
  ctx.fillStyle = color;
  ctx.font = `bold ${size}px system-ui, sans-serif`;
  ctx.textAlign = "center";
  ctx.textBaseline = "middle";
  ctx.fillText(text, at[0], at[1]);
}

function centroid(poly: Point[]): Point {
  let x = 0, y = 0;
  for (const p of poly) { x += p[0]; y += p[1]; }
  return [x / poly.length, y / poly.length];
}
