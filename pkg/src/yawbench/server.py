"""Websocket service hosting teleoperation sessions.

One session per connection. Incoming messages are JSON objects with a
`type` field: "control" (start/stop/reset plus configuration) and "goal"
(a streamed end-effect angle). Outgoing: "ack"/"error", per-tick
"state", "pong" in game mode, and a final "session_end" with the
persisted log path and summary.

Live sessions tick on a wall-clock pacer at the plant timestep (25 Hz at
the 0.04 s default); a session started with `paced: true` instead ticks
exactly once per received goal message, which makes serve-side replays
bit-identical to headless ones.
"""

from __future__ import annotations

import asyncio
import json
import logging
import time
from pathlib import Path

from fastapi import FastAPI, WebSocket, WebSocketDisconnect

from .config import WorkbenchConfig
from .rl.checkpoint import CheckpointError, load_checkpoint
from .teleop import RUNNING, Session, SessionError

log = logging.getLogger(__name__)


def create_app(workbench: WorkbenchConfig, checkpoint_path: str | Path) -> FastAPI:
    default_ckpt = load_checkpoint(checkpoint_path)
    app = FastAPI(title="yawbench teleop service")

    @app.get("/health")
    async def health():
        return {"status": "ok"}

    @app.websocket("/ws")
    async def ws_endpoint(websocket: WebSocket):
        await websocket.accept()
        conn = _Connection(websocket, workbench, default_ckpt)
        try:
            await conn.run()
        except WebSocketDisconnect:
            pass
        finally:
            await conn.shutdown()

    return app


class _Connection:
    def __init__(self, websocket: WebSocket, workbench: WorkbenchConfig,
                 default_ckpt):
        self.ws = websocket
        self.workbench = workbench
        self.default_ckpt = default_ckpt
        self.session: Session | None = None
        self.paced = False
        self.ticker: asyncio.Task | None = None
        self.send_lock = asyncio.Lock()

    async def send(self, message: dict):
        async with self.send_lock:
            await self.ws.send_text(json.dumps(message))

    async def run(self):
        while True:
            raw = await self.ws.receive_text()
            try:
                msg = json.loads(raw)
                if not isinstance(msg, dict):
                    raise ValueError("message must be an object")
            except ValueError as exc:
                await self.send({"type": "error", "detail": f"malformed message: {exc}"})
                continue
            kind = msg.get("type")
            if kind == "control":
                await self.handle_control(msg)
            elif kind == "goal":
                await self.handle_goal(msg)
            else:
                log.warning("ignoring unknown message type %r", kind)

    async def handle_control(self, msg: dict):
        action = msg.get("action")
        if action == "start":
            if self.session is not None and self.session.status == RUNNING:
                await self.send({"type": "error", "detail": "session already running"})
                return
            ckpt = self.default_ckpt
            if msg.get("checkpoint"):
                try:
                    ckpt = load_checkpoint(msg["checkpoint"])
                except CheckpointError as exc:
                    await self.send({"type": "error", "detail": str(exc)})
                    return
            self.paced = bool(msg.get("paced", False))
            self.session = Session(
                ckpt, sensor=self.workbench.sensor,
                mode=msg.get("mode", "free"),
                seed=int(msg.get("seed", 0)),
                log_dir=self.workbench.resolve_log_dir(),
                pong_config=self.workbench.pong)
            try:
                reply = self.session.control(msg)
            except SessionError as exc:
                await self.send({"type": "error", "detail": str(exc)})
                return
            await self.send(reply)
            if reply["type"] == "ack" and not self.paced:
                self.ticker = asyncio.create_task(self.tick_loop())
        elif action in ("stop", "reset"):
            await self.cancel_ticker()
            if self.session is None:
                await self.send({"type": "error", "detail": "no session"})
                return
            was_running = self.session.status == RUNNING or self.session.status == "dropped"
            try:
                reply = self.session.control(msg)
            except SessionError as exc:
                await self.send({"type": "error", "detail": str(exc)})
                return
            await self.send(reply)
            if action == "stop" and was_running:
                await self.send_session_end()
        else:
            await self.send({"type": "error",
                             "detail": f"unknown control action {action!r}"})

    async def handle_goal(self, msg: dict):
        if self.session is None or self.session.status != RUNNING:
            return   # stale goal after stop/drop: ignore
        try:
            angle = float(msg["angle_rad"])
        except (KeyError, TypeError, ValueError):
            await self.send({"type": "error", "detail": "goal needs numeric angle_rad"})
            return
        self.session.push_goal(angle)
        if self.paced:
            await self.do_tick()

    async def do_tick(self):
        state = self.session.tick()
        await self.send(state)
        if self.session.pong is not None:
            await self.send(self.session.pong_message())
        if state["dropped"]:
            self.session.finalize()
            await self.send_session_end()

    async def send_session_end(self):
        await self.send({"type": "session_end",
                         "log_path": str(self.session.log_path)
                         if self.session.log_path else None,
                         "summary": self.session.summary()})

    async def tick_loop(self):
        dt = self.session.checkpoint.plant_config.dt
        next_deadline = time.perf_counter() + dt
        try:
            while self.session.status == RUNNING:
                await self.do_tick()
                if self.session.status != RUNNING:
                    break
                delay = next_deadline - time.perf_counter()
                next_deadline += dt
                if delay > 0:
                    await asyncio.sleep(delay)
        except asyncio.CancelledError:
            raise
        except WebSocketDisconnect:
            pass

    async def cancel_ticker(self):
        if self.ticker is not None:
            self.ticker.cancel()
            try:
                await self.ticker
            except (asyncio.CancelledError, Exception):
                pass
            self.ticker = None

    async def shutdown(self):
        await self.cancel_ticker()
        if self.session is not None and self.session.status in (RUNNING, "dropped"):
            self.session.finalize()
