/** Browser entry point: connect, render, and forward input.
 *
 * Input frames are sent on a fixed 50 ms cadence but only while the
 * server-reported phase allows movement; while the question modal is
 * up (phase AlarmQuestion) no input frames leave the client at all.
 */

import { DrillClient } from "./client";
import { InputTracker } from "./input";
import { QuestionModal, PostGameForm, toast } from "./modals";
import { POST_GAME_QUESTIONS } from "./questions";
import { Camera, drawScene } from "./render";

const canvas = document.getElementById("scene") as HTMLCanvasElement;
const ctx = canvas.getContext("2d")!;
const statusEl = document.getElementById("status")!;
const joinForm = document.getElementById("join") as HTMLFormElement;
const subjectInput = document.getElementById("subject") as HTMLInputElement;

const cam = new Camera();
const tracker = new InputTracker();
const question = new QuestionModal();
const form = new PostGameForm();

let client: DrillClient | null = null;
let fitted = false;

function resize(): void {
  canvas.width = window.innerWidth;
  canvas.height = window.innerHeight;
  if (client?.plan) cam.fit(client.plan, canvas.width, canvas.height);
}
window.addEventListener("resize", resize);
resize();

function connect(subjectId: string): void {
  const proto = location.protocol === "https:" ? "wss" : "ws";
  const ws = new WebSocket(`${proto}://${location.host}/ws`);
  const c = new DrillClient((data) => {
    if (ws.readyState === WebSocket.OPEN) ws.send(data);
  }, {
    onWelcome: (sessionId, plan) => {
      statusEl.textContent = `session ${sessionId} on ${plan.name}`;
      joinForm.classList.add("hidden");
      fitted = false;
    },
    onRejected: (reason) => {
      statusEl.textContent = `rejected: ${reason}`;
    },
    onError: (reason) => {
      statusEl.textContent = `error: ${reason}`;
    },
    onQuestion: (prompt, options) => {
      tracker.releaseAll();
      question.show(prompt, options, (choice) => c.sendAnswer(choice));
    },
    onGreeting: (text) => toast(text),
    onFinished: (exit, totalTimeS, rescued) => {
      toast(`Out through exit ${exit} in ${totalTimeS.toFixed(1)} s` +
        (rescued ? ", patient safe" : ""));
      form.show(POST_GAME_QUESTIONS, (answers) =>
        c.sendPostQuestionnaire(answers));
    },
    onSealed: () => {
      statusEl.textContent = "session recorded, thanks for playing";
    },
  });
  ws.addEventListener("open", () => c.hello(subjectId));
  ws.addEventListener("message", (e) => c.handleMessage(String(e.data)));
  ws.addEventListener("close", () => {
    if (statusEl.textContent?.startsWith("session")) {
      statusEl.textContent = "disconnected";
    }
  });
  client = c;
}

joinForm.addEventListener("submit", (e) => {
  e.preventDefault();
  const id = subjectInput.value.trim();
  if (id) connect(id);
});

canvas.addEventListener("click", () => {
  if (client && !question.open && !form.open) canvas.requestPointerLock();
});
canvas.addEventListener("wheel", (e) => {
  cam.zoom(e.deltaY < 0 ? 1.1 : 0.9);
  e.preventDefault();
});
window.addEventListener("keydown", (e) => {
  const step = 20 / cam.scale;
  if (e.code === "ArrowLeft") cam.pan(-step, 0);
  else if (e.code === "ArrowRight") cam.pan(step, 0);
  else if (e.code === "ArrowUp") cam.pan(0, step);
  else if (e.code === "ArrowDown") cam.pan(0, -step);
});
tracker.attach(document);

setInterval(() => {
  // input only flows in movement phases; the modal phase sends nothing
  if (client && client.moving && !question.open && !form.open) {
    client.sendInput(tracker.next());
  }
}, 50);

function frame(): void {
  if (client?.plan) {
    if (!fitted) {
      cam.fit(client.plan, canvas.width, canvas.height);
      fitted = true;
    }
    drawScene(ctx, cam, client.plan, client.snapshot, canvas.width, canvas.height);
  } else {
    ctx.fillStyle = "#10141a";
    ctx.fillRect(0, 0, canvas.width, canvas.height);
  }
  requestAnimationFrame(frame);
}
requestAnimationFrame(frame);
