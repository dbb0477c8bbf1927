// Console entry point: one websocket, one animation loop. Incoming
// messages land in the buffered ConsoleState; rendering and goal
// emission happen once per frame.

import { GoalCoalescer, KnobDrag, angleToNeedle } from "./knob.js";
import { controlMessage, parseServerMessage } from "./protocol.js";
import { renderPong } from "./pong.js";
import { ConsoleState } from "./state.js";
import { renderTracking } from "./tracking.js";

const state = new ConsoleState();
const coalescer = new GoalCoalescer();
const drag = new KnobDrag();

const $ = <T extends HTMLElement>(id: string): T => {
  const el = document.getElementById(id);
  if (!el) throw new Error(`missing element #${id}`);
  return el as T;
};

const knobCanvas = $<HTMLCanvasElement>("knob");
const trackingCanvas = $<HTMLCanvasElement>("tracking");
const pongCanvas = $<HTMLCanvasElement>("pong");
const scoreboard = $<HTMLElement>("scoreboard");
const statusLine = $<HTMLElement>("status");
const startBtn = $<HTMLButtonElement>("start");
const stopBtn = $<HTMLButtonElement>("stop");
const sensorSel = $<HTMLSelectElement>("sensor");
const modeSel = $<HTMLSelectElement>("mode");

const url = `ws://${location.host}/ws`;
let socket: WebSocket | null = null;

function connect(): void {
  state.connection = "connecting";
  socket = new WebSocket(url);
  socket.addEventListener("open", () => {
    state.connection = "connected";
  });
  socket.addEventListener("close", () => {
    state.connection = "disconnected";
    socket = null;
    setTimeout(connect, 1000);
  });
  socket.addEventListener("message", (ev) => {
    const msg = parseServerMessage(String(ev.data));
    if (!msg) return;
    switch (msg.type) {
      case "state":
        state.pushState(msg, performance.now());
        break;
      case "pong":
        state.pushPong(msg);
        break;
      case "session_end":
        state.pushSessionEnd(msg);
        break;
      case "error":
        state.lastError = msg.detail;
        break;
      case "ack":
        break;
    }
  });
}

startBtn.addEventListener("click", () => {
  if (!socket || socket.readyState !== WebSocket.OPEN) return;
  state.clearTrace();
  state.lastError = "";
  state.phase = "running";
  state.sensor = sensorSel.value as ConsoleState["sensor"];
  state.mode = modeSel.value as ConsoleState["mode"];
  coalescer.reset();
  socket.send(
    controlMessage({
      action: "start",
      sensor: state.sensor,
      mode: state.mode,
      seed: Math.floor(Math.random() * 1_000_000),
    }),
  );
});

stopBtn.addEventListener("click", () => {
  if (!socket || socket.readyState !== WebSocket.OPEN) return;
  socket.send(controlMessage({ action: "stop" }));
});

function pointerOffset(ev: PointerEvent): { dx: number; dy: number } {
  const rect = knobCanvas.getBoundingClientRect();
  return {
    dx: ev.clientX - (rect.left + rect.width / 2),
    dy: ev.clientY - (rect.top + rect.height / 2),
  };
}

let dragging = false;
knobCanvas.addEventListener("pointerdown", (ev) => {
  if (state.connection !== "connected" || state.phase !== "running") return;
  const { dx, dy } = pointerOffset(ev);
  if (dx === 0 && dy === 0) return;
  dragging = true;
  knobCanvas.setPointerCapture(ev.pointerId);
  drag.start(dx, dy);
});
knobCanvas.addEventListener("pointermove", (ev) => {
  if (!dragging) return;
  const { dx, dy } = pointerOffset(ev);
  if (dx === 0 && dy === 0) return;
  const angle = drag.move(dx, dy);
  state.setKnob(angle);
  coalescer.update(angle);
});
knobCanvas.addEventListener("pointerup", () => {
  dragging = false;
  drag.end();
});

function renderKnob(): void {
  const ctx = knobCanvas.getContext("2d");
  if (!ctx) return;
  const w = knobCanvas.width;
  const h = knobCanvas.height;
  const r = Math.min(w, h) / 2 - 8;
  ctx.clearRect(0, 0, w, h);
  const disabled =
    state.connection !== "connected" || state.phase !== "running";
  ctx.strokeStyle = disabled ? "#bbb" : "#333";
  ctx.lineWidth = 3;
  ctx.beginPath();
  ctx.arc(w / 2, h / 2, r, 0, 2 * Math.PI);
  ctx.stroke();
  const needle = angleToNeedle(state.knobAngle);
  ctx.strokeStyle = disabled ? "#bbb" : "#e8833a";
  ctx.beginPath();
  ctx.moveTo(w / 2, h / 2);
  ctx.lineTo(w / 2 + needle.x * r * 0.85, h / 2 + needle.y * r * 0.85);
  ctx.stroke();
  ctx.fillStyle = "#444";
  ctx.fillText(`${state.knobAngle.toFixed(2)} rad`, 8, h - 8);
}

function renderStatus(): void {
  const bits = [
    state.connection,
    `session ${state.phase}`,
    `sensor ${state.sensor}`,
  ];
  if (state.summary && state.summary.mse !== null) {
    bits.push(`final MSE ${state.summary.mse.toFixed(4)}`);
  }
  if (state.lastError) bits.push(`error: ${state.lastError}`);
  statusLine.textContent = bits.join(" · ");
  statusLine.classList.toggle("error", state.lastError !== "");
}

function frame(): void {
  if (
    socket &&
    socket.readyState === WebSocket.OPEN &&
    state.phase === "running"
  ) {
    const out = coalescer.flush(performance.now());
    if (out) {
      state.noteGoalSent(performance.now());
      socket.send(out);
    }
  }
  renderKnob();
  renderStatus();
  renderTracking(trackingCanvas, state);
  if (state.mode === "pong") renderPong(pongCanvas, state.pong, scoreboard);
  requestAnimationFrame(frame);
}

connect();
requestAnimationFrame(frame);
