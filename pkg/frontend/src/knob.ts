// Circular knob input: the virtual demonstrating object. Dragging around
// the knob face sets the goal yaw; 12 o'clock is 0 rad and clockwise is
// negative, so a half-turn clockwise sweeps continuously to -pi.

import { goalMessage, wrapAngle } from "./protocol.js";

/** Pointer position relative to the knob centre -> yaw angle. */
export function pointerToAngle(dx: number, dy: number): number {
  if (dx === 0 && dy === 0) {
    throw new RangeError("pointer at knob centre has no angle");
  }
  // screen y grows downward; 12 o'clock (dy < 0) is zero, clockwise
  // (dx > 0 at the top) decreases the angle
  return wrapAngle(-Math.atan2(dx, -dy));
}

/** Knob angle -> unit direction for rendering the needle. */
export function angleToNeedle(angle: number): { x: number; y: number } {
  return { x: -Math.sin(angle), y: -Math.cos(angle) };
}

/**
 * Frame-rate goal coalescer: any number of knob updates per frame
 * collapse into at most one outgoing goal message (the server latch
 * keeps only the most recent goal anyway). flush() is called once per
 * animation frame.
 */
export class GoalCoalescer {
  private pending: number | null = null;
  private lastSent: number | null = null;

  update(angleRad: number): void {
    this.pending = wrapAngle(angleRad);
  }

  /** Returns the serialized goal message to send this frame, if any. */
  flush(nowMs: number): string | null {
    if (this.pending === null) return null;
    const angle = this.pending;
    this.pending = null;
    if (angle === this.lastSent) return null;
    this.lastSent = angle;
    return goalMessage(angle, nowMs);
  }

  reset(): void {
    this.pending = null;
    this.lastSent = null;
  }
}

/**
 * Drag tracker keeping the sweep continuous: each move applies the
 * wrapped difference from the previous pointer angle, so crossing the
 * +-pi seam never makes the knob jump by a full turn.
 */
export class KnobDrag {
  private lastPointer: number | null = null;

  constructor(private angle: number = 0) {}

  get value(): number {
    return this.angle;
  }

  start(dx: number, dy: number): void {
    this.lastPointer = pointerToAngle(dx, dy);
  }

  move(dx: number, dy: number): number {
    const p = pointerToAngle(dx, dy);
    if (this.lastPointer !== null) {
      this.angle = wrapAngle(this.angle + wrapAngle(p - this.lastPointer));
    } else {
      this.angle = p;
    }
    this.lastPointer = p;
    return this.angle;
  }

  end(): void {
    this.lastPointer = null;
  }
}
