// Live tracking chart: raw goal, sensed goal and actual yaw on a shared
// step axis, with the drop event annotated. Pure canvas drawing from the
// buffered ConsoleState; no interpolation across message gaps.

import { ConsoleState, TracePoint } from "./state.js";

const COLORS = {
  goalRaw: "#e8833a",
  goalSensed: "#b07cc6",
  phi: "#3a7be8",
  drop: "#d63031",
  grid: "#e0e0e0",
  text: "#444",
};

const Y_RANGE = Math.PI * 1.1;

export interface ChartLayout {
  width: number;
  height: number;
  padding: number;
}

export function yToPixel(y: number, layout: ChartLayout): number {
  const usable = layout.height - 2 * layout.padding;
  return layout.padding + (1 - (y + Y_RANGE) / (2 * Y_RANGE)) * usable;
}

export function stepToPixel(
  step: number,
  first: number,
  last: number,
  layout: ChartLayout,
): number {
  const usable = layout.width - 2 * layout.padding;
  const span = Math.max(1, last - first);
  return layout.padding + ((step - first) / span) * usable;
}

function drawTrace(
  ctx: CanvasRenderingContext2D,
  points: readonly TracePoint[],
  pick: (p: TracePoint) => number,
  color: string,
  layout: ChartLayout,
): void {
  if (points.length === 0) return;
  const first = points[0].step;
  const last = points[points.length - 1].step;
  ctx.strokeStyle = color;
  ctx.lineWidth = 1.5;
  ctx.beginPath();
  let prevStep: number | null = null;
  for (const p of points) {
    const x = stepToPixel(p.step, first, last, layout);
    const y = yToPixel(pick(p), layout);
    // a gap in the step sequence breaks the line: no interpolation
    if (prevStep === null || p.step !== prevStep + 1) ctx.moveTo(x, y);
    else ctx.lineTo(x, y);
    prevStep = p.step;
  }
  ctx.stroke();
}

export function renderTracking(
  canvas: HTMLCanvasElement,
  state: ConsoleState,
): void {
  const ctx = canvas.getContext("2d");
  if (!ctx) return;
  const layout: ChartLayout = {
    width: canvas.width,
    height: canvas.height,
    padding: 24,
  };
  ctx.clearRect(0, 0, layout.width, layout.height);

  ctx.strokeStyle = COLORS.grid;
  ctx.lineWidth = 1;
  for (const gy of [-Math.PI, -Math.PI / 2, 0, Math.PI / 2, Math.PI]) {
    const y = yToPixel(gy, layout);
    ctx.beginPath();
    ctx.moveTo(layout.padding, y);
    ctx.lineTo(layout.width - layout.padding, y);
    ctx.stroke();
  }

  const points = state.points();
  drawTrace(ctx, points, (p) => p.goalRaw, COLORS.goalRaw, layout);
  drawTrace(ctx, points, (p) => p.goalSensed, COLORS.goalSensed, layout);
  drawTrace(ctx, points, (p) => p.phi, COLORS.phi, layout);

  const drop = state.dropStep();
  if (drop !== null && points.length > 0) {
    const x = stepToPixel(
      drop,
      points[0].step,
      points[points.length - 1].step,
      layout,
    );
    ctx.strokeStyle = COLORS.drop;
    ctx.setLineDash([4, 3]);
    ctx.beginPath();
    ctx.moveTo(x, layout.padding);
    ctx.lineTo(x, layout.height - layout.padding);
    ctx.stroke();
    ctx.setLineDash([]);
    ctx.fillStyle = COLORS.drop;
    ctx.fillText("drop", x + 4, layout.padding + 10);
  }

  ctx.fillStyle = COLORS.text;
  const mse = state.windowedMse();
  const readout =
    mse === null ? "MSE: --" : `MSE: ${mse.toFixed(4)} rad²`;
  ctx.fillText(readout, layout.padding, 14);
  ctx.fillText(`latency ~${state.latencyMs.toFixed(0)} ms`, layout.padding + 140, 14);
}
