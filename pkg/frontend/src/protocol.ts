// Wire protocol shared with the teleoperation service. The console speaks
// exactly this protocol and nothing else; every number it displays
// originates from a server message.

export interface ControlMessage {
  type: "control";
  action: "start" | "stop" | "reset";
  mode?: "free" | "pong";
  checkpoint?: string;
  sensor?: "ideal" | "imu" | "camera";
  seed?: number;
  paced?: boolean;
}

export interface GoalMessage {
  type: "goal";
  t_ms: number;
  angle_rad: number;
}

export interface FingerState {
  s: number;
  n: number;
}

export interface StateMessage {
  type: "state";
  step: number;
  phi: number;
  goal_raw: number;
  goal_sensed: number;
  fingers: FingerState[];
  reward: number;
  dropped: boolean;
  tick_ms: number;
}

export interface PongMessage {
  type: "pong";
  ball: [number, number];
  paddle_y: number;
  hits: number;
  failures: number;
  status: "active" | "ended";
}

export interface AckMessage {
  type: "ack";
  detail?: string;
}

export interface ErrorMessage {
  type: "error";
  detail: string;
}

export interface SessionEndMessage {
  type: "session_end";
  log_path: string | null;
  summary: { mse: number | null; sat: number | null; drop: boolean };
}

export type ServerMessage =
  | StateMessage
  | PongMessage
  | AckMessage
  | ErrorMessage
  | SessionEndMessage;

export type ClientMessage = ControlMessage | GoalMessage;

/** Wrap an angle to (-pi, pi], mapping -pi to +pi. */
export function wrapAngle(raw: number): number {
  if (!Number.isFinite(raw)) {
    throw new RangeError(`cannot wrap non-finite angle ${raw}`);
  }
  let a = raw % (2 * Math.PI);
  if (a <= -Math.PI) a += 2 * Math.PI;
  else if (a > Math.PI) a -= 2 * Math.PI;
  return a;
}

/**
 * Parse one incoming frame. Returns null for frames the console should
 * ignore: invalid JSON, non-objects and unknown message types (the
 * protocol reserves those for future use).
 */
export function parseServerMessage(data: string): ServerMessage | null {
  let doc: unknown;
  try {
    doc = JSON.parse(data);
  } catch {
    return null;
  }
  if (typeof doc !== "object" || doc === null) return null;
  const msg = doc as { type?: unknown };
  switch (msg.type) {
    case "state":
    case "pong":
    case "ack":
    case "error":
    case "session_end":
      return doc as ServerMessage;
    default:
      return null;
  }
}

export function goalMessage(angleRad: number, tMs: number): string {
  return JSON.stringify({
    type: "goal",
    t_ms: tMs,
    angle_rad: wrapAngle(angleRad),
  } satisfies GoalMessage);
}

export function controlMessage(msg: Omit<ControlMessage, "type">): string {
  return JSON.stringify({ type: "control", ...msg } satisfies ControlMessage);
}
