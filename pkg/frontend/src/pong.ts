// Pong extension view: ball, paddle and the hit/failure scoreboard, all
// rendered verbatim from server pong messages. The console never
// simulates the game.

import { PongMessage } from "./protocol.js";

export interface PongScore {
  hits: number;
  failures: number;
  ended: boolean;
}

export function scoreFromMessage(msg: PongMessage): PongScore {
  return {
    hits: msg.hits,
    failures: msg.failures,
    ended: msg.status === "ended",
  };
}

export function renderPong(
  canvas: HTMLCanvasElement,
  msg: PongMessage | null,
  scoreboard: HTMLElement,
): void {
  const ctx = canvas.getContext("2d");
  if (!ctx) return;
  const w = canvas.width;
  const h = canvas.height;
  ctx.clearRect(0, 0, w, h);
  ctx.strokeStyle = "#888";
  ctx.strokeRect(0.5, 0.5, w - 1, h - 1);
  if (!msg) {
    scoreboard.textContent = "pong: waiting for session";
    return;
  }

  const paddleHalf = 0.1 * h;
  const px = 4;
  const py = msg.paddle_y * h;
  ctx.fillStyle = "#3a7be8";
  ctx.fillRect(px - 3, py - paddleHalf, 6, 2 * paddleHalf);

  const bx = msg.ball[0] * w;
  const by = msg.ball[1] * h;
  ctx.fillStyle = "#222";
  ctx.beginPath();
  ctx.arc(bx, by, 5, 0, 2 * Math.PI);
  ctx.fill();

  scoreboard.textContent = `hits ${msg.hits} · failures ${msg.failures}`;
  if (msg.status === "ended") {
    ctx.fillStyle = "#d63031";
    ctx.font = "16px sans-serif";
    ctx.fillText("ended early", w / 2 - 40, h / 2);
  }
}
