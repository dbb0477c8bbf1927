// End-to-end console flow against a scripted fake socket: the sequence a
// live session produces (ack, state/pong stream, session_end) drives the
// same dispatch the browser entry point uses, and the displayed numbers
// must agree with the server's own summary.

import { describe, expect, it } from "vitest";

import { parseServerMessage, wrapAngle } from "../src/protocol.js";
import { scoreFromMessage } from "../src/pong.js";
import { ConsoleState } from "../src/state.js";

/** Message dispatch mirroring main.ts. */
function dispatch(state: ConsoleState, data: string, nowMs: number): void {
  const msg = parseServerMessage(data);
  if (!msg) return;
  switch (msg.type) {
    case "state":
      state.pushState(msg, nowMs);
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
}

function scriptedSession(steps: number): {
  frames: string[];
  serverMse: number;
  hits: number;
  failures: number;
} {
  const frames: string[] = [JSON.stringify({ type: "ack", detail: "running" })];
  let sum = 0;
  let hits = 0;
  let failures = 0;
  for (let i = 0; i < steps; i++) {
    const goal = 0.5 * Math.sin(0.05 * i);
    const phi = 0.5 * Math.sin(0.05 * (i - 3));
    const e = wrapAngle(phi - goal);
    sum += e * e;
    frames.push(
      JSON.stringify({
        type: "state",
        step: i,
        phi,
        goal_raw: goal,
        goal_sensed: goal,
        fingers: [],
        reward: -Math.abs(e),
        dropped: false,
        tick_ms: 2,
      }),
    );
    if (i % 40 === 39) hits += 1;
    if (i % 90 === 89) failures += 1;
    frames.push(
      JSON.stringify({
        type: "pong",
        ball: [0.5, 0.5],
        paddle_y: 0.5,
        hits,
        failures,
        status: "active",
      }),
    );
  }
  const serverMse = sum / steps;
  frames.push(
    JSON.stringify({
      type: "session_end",
      log_path: "runs/session_x.csv",
      summary: { mse: serverMse, sat: 0, drop: false },
    }),
  );
  return { frames, serverMse, hits, failures };
}

describe("scripted session flow", () => {
  it("windowed MSE readout matches the server summary", () => {
    const { frames, serverMse } = scriptedSession(200);
    const state = new ConsoleState(1000);
    state.phase = "running";
    frames.forEach((f, i) => dispatch(state, f, i));
    expect(state.phase).toBe("ended");
    // display rounding is 4 decimal places
    expect(state.windowedMse()!.toFixed(4)).toBe(serverMse.toFixed(4));
    expect(state.summary!.mse).toBe(serverMse);
  });

  it("pong counters track the server exactly", () => {
    const { frames, hits, failures } = scriptedSession(200);
    const state = new ConsoleState(1000);
    state.phase = "running";
    frames.forEach((f, i) => dispatch(state, f, i));
    const score = scoreFromMessage(state.pong!);
    expect(score.hits).toBe(hits);
    expect(score.failures).toBe(failures);
    expect(score.ended).toBe(false);
  });

  it("a drop mid-session freezes the phase and marks the step", () => {
    const state = new ConsoleState(1000);
    state.phase = "running";
    const { frames } = scriptedSession(50);
    frames.slice(0, 20).forEach((f, i) => dispatch(state, f, i));
    dispatch(
      state,
      JSON.stringify({
        type: "state",
        step: 20,
        phi: 0,
        goal_raw: 0,
        goal_sensed: 0,
        fingers: [],
        reward: -1,
        dropped: true,
        tick_ms: 2,
      }),
      21,
    );
    expect(state.phase).toBe("dropped");
    expect(state.dropStep()).toBe(20);
    // session_end after a drop keeps the dropped phase
    dispatch(
      state,
      JSON.stringify({
        type: "session_end",
        log_path: null,
        summary: { mse: 0.1, sat: 0, drop: true },
      }),
      22,
    );
    expect(state.phase).toBe("dropped");
    expect(state.summary!.drop).toBe(true);
  });

  it("unknown frame types in the stream are ignored", () => {
    const state = new ConsoleState(100);
    dispatch(state, '{"type":"debug","x":1}', 0);
    dispatch(state, "garbage", 1);
    expect(state.points().length).toBe(0);
    expect(state.lastError).toBe("");
  });
});
