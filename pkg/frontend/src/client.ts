/** Drill client: speaks the wire protocol over an injected socket.
 *
 * The client is deliberately stateless about scenario truth: everything
 * it renders comes from the welcome frame (static plan) and the single
 * latest snapshot. Reconnecting mid-session resumes cleanly from the
 * next snapshot received.
 */

import {
  InputCommand,
  PlanDocument,
  SnapshotFrame,
  Phase,
  parseServerFrame,
} from "./protocol";

export interface ClientHooks {
  onWelcome?: (sessionId: string, plan: PlanDocument) => void;
  onRejected?: (reason: string) => void;
  onError?: (reason: string) => void;
  onSnapshot?: (snap: SnapshotFrame) => void;
  onQuestion?: (prompt: string, options: Array<[string, string]>) => void;
  onGreeting?: (text: string) => void;
  onFinished?: (exit: string, totalTimeS: number, rescued: boolean) => void;
  onSealed?: (sessionId: string, path: string | null) => void;
}

export class DrillClient {
  plan: PlanDocument | null = null;
  sessionId: string | null = null;
  snapshot: SnapshotFrame | null = null;

  constructor(
    private send: (data: string) => void,
    private hooks: ClientHooks = {},
  ) {}

  /** Current phase as reported by the server; Briefing until the first snapshot. */
  get phase(): Phase {
    return this.snapshot ? this.snapshot.phase : "Briefing";
  }

  get moving(): boolean {
    return this.phase === "EscortToWard" || this.phase === "Evacuation";
  }

  hello(subjectId: string): void {
    this.send(JSON.stringify({ type: "hello", subject_id: subjectId }));
  }

  sendInput(cmd: InputCommand): void {
    this.send(JSON.stringify({ type: "input", ...cmd }));
  }

  sendAnswer(choice: string): void {
    this.send(JSON.stringify({ type: "answer", choice }));
  }

  sendPostQuestionnaire(answers: Record<string, boolean>): void {
    this.send(JSON.stringify({ type: "post_questionnaire", answers }));
  }

  /** Feed one raw message from the socket. Unknown frames are ignored. */
  handleMessage(raw: string): void {
    const frame = parseServerFrame(raw);
    if (frame === null) return;
    switch (frame.type) {
      case "welcome":
        this.sessionId = frame.session_id;
        this.plan = frame.plan;
        this.hooks.onWelcome?.(frame.session_id, frame.plan);
        break;
      case "rejected":
        this.hooks.onRejected?.(frame.reason);
        break;
      case "error":
        this.hooks.onError?.(frame.reason);
        break;
      case "snapshot":
        // full replacement: the latest snapshot is the only world state
        this.snapshot = frame;
        this.hooks.onSnapshot?.(frame);
        break;
      case "question":
        this.hooks.onQuestion?.(frame.prompt, frame.options);
        break;
      case "greeting":
        this.hooks.onGreeting?.(frame.text);
        break;
      case "finished":
        this.hooks.onFinished?.(frame.exit, frame.total_time_s, frame.rescued);
        break;
      case "sealed":
        this.hooks.onSealed?.(frame.session_id, frame.path);
        break;
      default:
        break;
    }
  }
}
