// Buffered console state decoupling message arrival from rendering.
// Traces are kept in bounded ring buffers (default 30 s at 25 Hz); the
// windowed MSE readout is recomputed from the buffered server values so
// it matches the server's own summary up to display rounding.

import {
  PongMessage,
  SessionEndMessage,
  StateMessage,
  wrapAngle,
} from "./protocol.js";

export type ConnectionStatus = "disconnected" | "connecting" | "connected";
export type SessionPhase = "idle" | "running" | "dropped" | "ended";

export interface TracePoint {
  step: number;
  goalRaw: number;
  goalSensed: number;
  phi: number;
  dropped: boolean;
}

const DEFAULT_WINDOW = 25 * 30; // 30 s of 25 Hz ticks

export class ConsoleState {
  connection: ConnectionStatus = "disconnected";
  phase: SessionPhase = "idle";
  sensor: "ideal" | "imu" | "camera" = "ideal";
  mode: "free" | "pong" = "free";
  knobAngle = 0;
  lastError = "";
  pong: PongMessage | null = null;
  summary: SessionEndMessage["summary"] | null = null;
  logPath: string | null = null;
  /** round-trip estimate in ms from goal send to next state render */
  latencyMs = 0;

  private readonly capacity: number;
  private trace: TracePoint[] = [];
  private lastGoalSentMs: number | null = null;

  constructor(capacity: number = DEFAULT_WINDOW) {
    if (capacity < 1) throw new RangeError("capacity must be >= 1");
    this.capacity = capacity;
  }

  setKnob(angleRad: number): void {
    this.knobAngle = wrapAngle(angleRad);
  }

  noteGoalSent(nowMs: number): void {
    this.lastGoalSentMs = nowMs;
  }

  pushState(msg: StateMessage, nowMs: number): void {
    this.trace.push({
      step: msg.step,
      goalRaw: msg.goal_raw,
      goalSensed: msg.goal_sensed,
      phi: msg.phi,
      dropped: msg.dropped,
    });
    if (this.trace.length > this.capacity) {
      this.trace.splice(0, this.trace.length - this.capacity);
    }
    if (msg.dropped) this.phase = "dropped";
    if (this.lastGoalSentMs !== null) {
      this.latencyMs = nowMs - this.lastGoalSentMs;
      this.lastGoalSentMs = null;
    }
  }

  pushPong(msg: PongMessage): void {
    this.pong = msg;
  }

  pushSessionEnd(msg: SessionEndMessage): void {
    this.summary = msg.summary;
    this.logPath = msg.log_path;
    if (this.phase !== "dropped") this.phase = "ended";
  }

  points(): readonly TracePoint[] {
    return this.trace;
  }

  clearTrace(): void {
    this.trace = [];
    this.pong = null;
    this.summary = null;
    this.logPath = null;
  }

  /**
   * Mean squared wrapped error between actual yaw and the sensed goal
   * over the buffered window -- the same quantity the server reports in
   * its session summary, computed from the server's own values.
   */
  windowedMse(): number | null {
    if (this.trace.length === 0) return null;
    let sum = 0;
    for (const p of this.trace) {
      const e = wrapAngle(p.phi - p.goalSensed);
      sum += e * e;
    }
    return sum / this.trace.length;
  }

  dropStep(): number | null {
    for (const p of this.trace) {
      if (p.dropped) return p.step;
    }
    return null;
  }
}
