/** Wire protocol types: one JSON object per WebSocket message. */

export type Point = [number, number];
export type Segment = [Point, Point];

export interface PlanDoor {
  id: string;
  segment: Segment;
  initially_open: boolean;
}

export interface PlanExit {
  label: string;
  segment: Segment;
}

export interface PlanZone {
  label: string;
  polygon: Point[];
}

export interface PlanSign {
  node: Point;
  to: Point;
}

/** Floorplan document embedded in the welcome frame. Meters, +x east, +y north. */
export interface PlanDocument {
  name: string;
  walls: Segment[];
  doors: PlanDoor[];
  exits: PlanExit[];
  waypoints: Record<string, Point>;
  safe_zones: PlanZone[];
  signage: PlanSign[];
}

export interface InputCommand {
  forward: boolean;
  back: boolean;
  left: boolean;
  right: boolean;
  look_yaw: number;
  interact: boolean;
}

export type Phase =
  | "Briefing"
  | "EscortToWard"
  | "AlarmQuestion"
  | "Evacuation"
  | "Finished";

export interface WelcomeFrame {
  type: "welcome";
  session_id: string;
  plan_digest: string;
  plan: PlanDocument;
  tick_dt: number;
}

export interface SnapshotFrame {
  type: "snapshot";
  seq: number;
  t: number;
  phase: Phase;
  avatar: { x: number; y: number; yaw: number; pushing: boolean };
  wheelchair: { x: number; y: number; attached: boolean };
  doors: Record<string, boolean>;
}

export interface QuestionFrame {
  type: "question";
  prompt: string;
  options: Array<[string, string]>;
}

export interface GreetingFrame {
  type: "greeting";
  text: string;
}

export interface FinishedFrame {
  type: "finished";
  exit: string;
  total_time_s: number;
  rescued: boolean;
}

export interface SealedFrame {
  type: "sealed";
  session_id: string;
  path: string | null;
}

export interface RejectedFrame {
  type: "rejected";
  reason: string;
}

export interface ErrorFrame {
  type: "error";
  reason: string;
}

export type ServerFrame =
  | WelcomeFrame
  | SnapshotFrame
  | QuestionFrame
  | GreetingFrame
  | FinishedFrame
  | SealedFrame
  | RejectedFrame
  | ErrorFrame;

export function parseServerFrame(raw: string): ServerFrame | null {
  let obj: unknown;
  try {
    obj = JSON.parse(raw);
  } catch {
    return null;
  }
  if (typeof obj !== "object" || obj === null) return null;
  const type = (obj as { type?: unknown }).type;
  if (typeof type !== "string") return null;
  return obj as ServerFrame;
}
