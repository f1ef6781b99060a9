import { describe, expect, it } from "vitest";

import { DrillClient } from "../src/client";
import { PlanDocument, SnapshotFrame } from "../src/protocol";

const PLAN: PlanDocument = {
  name: "box",
  walls: [[[0, 0], [10, 0]], [[10, 0], [10, 10]], [[10, 10], [0, 10]], [[0, 10], [0, 0]]],
  doors: [],
  exits: [{ label: "A", segment: [[4, 0], [6, 0]] }],
  waypoints: { E: [5, 5], F: [1, 9], L: [9, 9], ES: [1, 1] },
  safe_zones: [],
  signage: [],
};

function snap(phase: SnapshotFrame["phase"], seq = 1): string {
  return JSON.stringify({
    type: "snapshot",
    seq,
    t: seq * 0.1,
    phase,
    avatar: { x: 5, y: 5, yaw: 0, pushing: true },
    wheelchair: { x: 5, y: 5, attached: true },
    doors: {},
  });
}

function makeClient(hooks = {}) {
  const sent: Array<Record<string, unknown>> = [];
  const client = new DrillClient((d) => sent.push(JSON.parse(d)), hooks);
  return { client, sent };
}

describe("DrillClient", () => {
  it("sends a hello frame with the subject id", () => {
    const { client, sent } = makeClient();
    client.hello("alice");
    expect(sent).toEqual([{ type: "hello", subject_id: "alice" }]);
  });

  it("stores plan and session id from the welcome frame", () => {
    let got: string | null = null;
    const { client } = makeClient({
      onWelcome: (sessionId: string) => { got = sessionId; },
    });
    client.handleMessage(JSON.stringify({
      type: "welcome", session_id: "s-1", plan_digest: "x", plan: PLAN, tick_dt: 0.05,
    }));
    expect(client.sessionId).toBe("s-1");
    expect(client.plan?.name).toBe("box");
    expect(got).toBe("s-1");
  });

  it("reports Briefing until the first snapshot arrives", () => {
    const { client } = makeClient();
    expect(client.phase).toBe("Briefing");
    expect(client.moving).toBe(false);
    client.handleMessage(snap("EscortToWard"));
    expect(client.phase).toBe("EscortToWard");
    expect(client.moving).toBe(true);
  });

  it("replaces the snapshot wholesale; the latest one is the only state", () => {
    const { client } = makeClient();
    client.handleMessage(snap("EscortToWard", 1));
    const first = client.snapshot;
    client.handleMessage(snap("AlarmQuestion", 2));
    expect(client.snapshot).not.toBe(first);
    expect(client.snapshot?.seq).toBe(2);
    expect(client.phase).toBe("AlarmQuestion");
    expect(client.moving).toBe(false);
  });

  it("routes question, greeting, finished, and sealed to hooks", () => {
    const calls: string[] = [];
    const { client } = makeClient({
      onQuestion: (prompt: string, options: Array<[string, string]>) =>
        calls.push(`q:${prompt}:${options.length}`),
      onGreeting: (text: string) => calls.push(`g:${text}`),
      onFinished: (exit: string, t: number, rescued: boolean) =>
        calls.push(`f:${exit}:${t}:${rescued}`),
      onSealed: (sid: string, path: string | null) =>
        calls.push(`s:${sid}:${path}`),
    });
    client.handleMessage(JSON.stringify({
      type: "question", prompt: "What?", options: [["a", "x"], ["b", "y"]],
    }));
    client.handleMessage(JSON.stringify({ type: "greeting", text: "hi" }));
    client.handleMessage(JSON.stringify({
      type: "finished", exit: "B", total_time_s: 41.2, rescued: true,
    }));
    client.handleMessage(JSON.stringify({
      type: "sealed", session_id: "s-1", path: "/tmp/s-1.evlog",
    }));
    expect(calls).toEqual([
      "q:What?:2", "g:hi", "f:B:41.2:true", "s:s-1:/tmp/s-1.evlog",
    ]);
  });

  it("routes rejected and error frames", () => {
    const reasons: string[] = [];
    const { client } = makeClient({
      onRejected: (r: string) => reasons.push(`rej:${r}`),
      onError: (r: string) => reasons.push(`err:${r}`),
    });
    client.handleMessage(JSON.stringify({ type: "rejected", reason: "already played" }));
    client.handleMessage(JSON.stringify({ type: "error", reason: "expected hello" }));
    expect(reasons).toEqual(["rej:already played", "err:expected hello"]);
  });

  it("ignores unknown frames and garbage without throwing", () => {
    const { client } = makeClient();
    client.handleMessage(JSON.stringify({ type: "party", volume: 11 }));
    client.handleMessage("not json at all");
    client.handleMessage(JSON.stringify([1, 2, 3]));
    client.handleMessage(JSON.stringify({ no_type: true }));
    expect(client.snapshot).toBeNull();
  });

  it("serializes input, answer, and questionnaire frames", () => {
    const { client, sent } = makeClient();
    client.sendInput({
      forward: true, back: false, left: false, right: false,
      look_yaw: 1.5708, interact: true,
    });
    client.sendAnswer("d");
    client.sendPostQuestionnaire({ is_gamer: true, fire_training: false });
    expect(sent[0]).toEqual({
      type: "input", forward: true, back: false, left: false, right: false,
      look_yaw: 1.5708, interact: true,
    });
    expect(sent[1]).toEqual({ type: "answer", choice: "d" });
    expect(sent[2]).toEqual({
      type: "post_questionnaire",
      answers: { is_gamer: true, fire_training: false },
    });
  });
});
