/** Keyboard/mouse state mapped to per-frame InputCommands.
 *
 * W/S/A/D are held flags, mouse movement accumulates into look_yaw,
 * and F is edge-triggered: each physical tap produces interact=true in
 * exactly one emitted command, no matter how long the key stays down
 * or how many frames pass in between.
 */

import { InputCommand } from "./protocol";

export const YAW_PER_PIXEL = 0.004;

const MOVE_CODES: Record<string, keyof Pick<InputCommand, "forward" | "back" | "left" | "right">> = {
  KeyW: "forward",
  KeyS: "back",
  KeyA: "left",
  KeyD: "right",
};

export class InputTracker {
  private held = new Set<string>();
  private yaw = 0;
  private pendingInteract = false;

  keyDown(code: string, repeat = false): void {
    if (repeat) return;
    if (code === "KeyF") {
      this.pendingInteract = true;
      return;
    }
    if (code in MOVE_CODES) this.held.add(code);
  }

  keyUp(code: string): void {
    this.held.delete(code);
  }

  /** dx: horizontal mouse movement in pixels; right turns clockwise. */
  mouseMove(dx: number): void {
    this.yaw -= dx * YAW_PER_PIXEL;
  }

  get lookYaw(): number {
    return this.yaw;
  }

  /** Drop all held keys (used when focus is lost or a modal opens). */
  releaseAll(): void {
    this.held.clear();
    this.pendingInteract = false;
  }

  /** Snapshot the current command; consumes any pending interact edge. */
  next(): InputCommand {
    const cmd: InputCommand = {
      forward: this.held.has("KeyW"),
      back: this.held.has("KeyS"),
      left: this.held.has("KeyA"),
      right: this.held.has("KeyD"),
      look_yaw: Math.round(this.yaw * 10000) / 10000,
      interact: this.pendingInteract,
    };
    this.pendingInteract = false;
    return cmd;
  }

  /** Wire the tracker to DOM events on a pointer-locked canvas. */
  attach(target: HTMLElement | Document): () => void {
    const down = (e: Event) => {
      const ke = e as KeyboardEvent;
      if (ke.code in MOVE_CODES || ke.code === "KeyF") ke.preventDefault();
      this.keyDown(ke.code, ke.repeat);
    };
    const up = (e: Event) => this.keyUp((e as KeyboardEvent).code);
    const move = (e: Event) => this.mouseMove((e as MouseEvent).movementX);
    target.addEventListener("keydown", down);
    target.addEventListener("keyup", up);
    target.addEventListener("mousemove", move);
    return () => {
      target.removeEventListener("keydown", down);
      target.removeEventListener("keyup", up);
      target.removeEventListener("mousemove", move);
    };
  }
}
