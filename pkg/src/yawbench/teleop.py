"""Real-time teleoperation session engine.

A Session owns one plant + policy control loop running at the trained
timestep, fed by a zero-order-hold goal latch through a selectable
sensor model, with every step logged. Pong mode additionally maps the
object yaw onto a paddle for the extension game. The engine is
transport-independent: the websocket server (see `server`) drives it,
and headless replay drives the exact same code path.
"""

from __future__ import annotations

import math
import time
import uuid
from dataclasses import dataclass, replace
from pathlib import Path

import numpy as np

from . import plant as plant_mod
from .core import EpisodeLog, Goal, build_observation
from .goals import GoalLatch, SensorModel, SensorSim
from .metrics import mse, saturation
from .reward import compute_reward
from .rl.checkpoint import PolicyCheckpoint
from .trajfile import TrajectoryFile, write_trajectory


@dataclass(frozen=True)
class PongConfig:
    ball_speed: float = 0.6         # units/s, constant
    paddle_half_height: float = 0.1
    serve_angle: float = math.pi / 4   # max |angle| off horizontal at serve
    yaw_span: float = 1.0           # |yaw| mapped onto the paddle range

    def paddle_y(self, yaw: float) -> float:
        clamped = max(-self.yaw_span, min(self.yaw_span, yaw))
        return 0.5 + clamped / (2.0 * self.yaw_span) * 0.8


@dataclass
class PongState:
    ball_x: float
    ball_y: float
    vel_x: float
    vel_y: float
    paddle_y: float = 0.5
    hits: int = 0
    failures: int = 0
    active: bool = True


def serve_ball(config: PongConfig, rng: np.random.Generator,
               toward_paddle: bool = True) -> tuple[float, float, float, float]:
    angle = float(rng.uniform(-config.serve_angle, config.serve_angle))
    direction = -1.0 if toward_paddle else 1.0
    vx = direction * config.ball_speed * math.cos(angle)
    vy = config.ball_speed * math.sin(angle)
    return 0.5, 0.5, vx, vy


def new_pong(config: PongConfig, rng: np.random.Generator) -> PongState:
    x, y, vx, vy = serve_ball(config, rng)
    return PongState(ball_x=x, ball_y=y, vel_x=vx, vel_y=vy)


def pong_step(pong: PongState, config: PongConfig, object_yaw: float,
              dt: float, rng: np.random.Generator) -> PongState:
    """Advance the ball one timestep; paddle follows the object yaw."""
    if not pong.active:
        return pong
    p = replace(pong)
    p.paddle_y = config.paddle_y(object_yaw)
    p.ball_x += p.vel_x * dt
    p.ball_y += p.vel_y * dt
    # top/bottom/right walls reflect
    if p.ball_y < 0.0:
        p.ball_y = -p.ball_y
        p.vel_y = -p.vel_y
    elif p.ball_y > 1.0:
        p.ball_y = 2.0 - p.ball_y
        p.vel_y = -p.vel_y
    if p.ball_x > 1.0:
        p.ball_x = 2.0 - p.ball_x
        p.vel_x = -p.vel_x
    if p.ball_x < 0.0:
        if abs(p.ball_y - p.paddle_y) <= config.paddle_half_height:
            p.hits += 1
            p.ball_x = -p.ball_x
            p.vel_x = -p.vel_x
        else:
            p.failures += 1
            p.ball_x, p.ball_y, p.vel_x, p.vel_y = serve_ball(config, rng)
    return p


IDLE, RUNNING, DROPPED, ENDED = "idle", "running", "dropped", "ended"


class SessionError(RuntimeError):
    pass


class Session:
    """One teleoperation session: idle -> running -> (dropped|ended).

    Configuration commands are only accepted while idle; the network
    receive path writes only the goal latch; tick() is called by exactly
    one owner (the pacing loop or a paced driver).
    """

    def __init__(self, checkpoint: PolicyCheckpoint,
                 sensor: SensorModel | None = None, mode: str = "free",
                 seed: int = 0, log_dir: str | Path = ".",
                 pong_config: PongConfig | None = None):
        self.id = uuid.uuid4().hex[:12]
        self.checkpoint = checkpoint
        self.sensor = sensor or SensorModel(kind="ideal")
        self.mode = mode
        self.seed = seed
        self.log_dir = Path(log_dir)
        self.pong_config = pong_config or PongConfig()
        self.status = IDLE
        self.latch = GoalLatch(Goal(0.0))
        self.pong: PongState | None = None
        self.log: EpisodeLog | None = None
        self.log_path: Path | None = None
        self._step_index = 0
        self.last_tick_ms = 0.0

    # -- command state machine ---------------------------------------------

    def control(self, command: dict) -> dict:
        action = command.get("action")
        if action == "start":
            if self.status == RUNNING:
                return {"type": "error", "detail": "session already running"}
            self._configure(command)
            self._start()
            return {"type": "ack", "detail": f"session {self.id} running"}
        if action == "stop":
            if self.status == RUNNING or self.status == DROPPED:
                path = self.finalize()
                return {"type": "ack", "detail": "stopped",
                        "log_path": str(path) if path else None}
            self.status = IDLE
            return {"type": "ack", "detail": "idle"}
        if action == "reset":
            if self.status == RUNNING:
                return {"type": "error", "detail": "stop before reset"}
            self._configure(command)
            self.status = IDLE
            return {"type": "ack", "detail": "reset"}
        return {"type": "error", "detail": f"unknown control action {action!r}"}

    def _configure(self, command: dict):
        if "sensor" in command:
            kind = command["sensor"]
            try:
                self.sensor = SensorModel(kind=kind)
            except ValueError as exc:
                raise SessionError(str(exc)) from exc
        if "mode" in command:
            if command["mode"] not in ("free", "pong"):
                raise SessionError(f"unknown mode {command['mode']!r}")
            self.mode = command["mode"]
        if "seed" in command:
            self.seed = int(command["seed"])

    def _start(self):
        plant_config = self.checkpoint.plant_config
        self._rng = np.random.default_rng(self.seed)
        self._agent = self.checkpoint.build_agent()
        self._state = plant_mod.reset(plant_config, self._rng, (0.0, 0.0))
        self._sensor_sim = SensorSim(self.sensor, np.random.default_rng(self.seed + 1),
                                     plant_config.dt)
        self.latch = GoalLatch(Goal(0.0))
        self.log = EpisodeLog(dt=plant_config.dt)
        self.log_path = None
        self._step_index = 0
        self.pong = (new_pong(self.pong_config, self._rng)
                     if self.mode == "pong" else None)
        self.status = RUNNING

    # -- control loop ------------------------------------------------------

    def push_goal(self, yaw: float):
        self.latch.push(Goal(yaw))

    def tick(self) -> dict:
        """One control step; returns the state broadcast message."""
        if self.status != RUNNING:
            raise SessionError(f"cannot tick a session in state {self.status}")
        t0 = time.perf_counter()
        cfg = self.checkpoint.plant_config
        raw = self.latch.read()
        sensed = self._sensor_sim.apply(raw)
        obs = build_observation(self._state, sensed)
        action = np.clip(self._agent.act(obs), -1.0, 1.0)
        self._state, dropped = plant_mod.step(cfg, self._state, action)
        reward = compute_reward(self.checkpoint.reward_config,
                                Goal(self._state.phi), sensed, dropped)
        self.log.append(self._step_index, self._state.phi, sensed.yaw,
                        action, reward, dropped, goal_raw=raw.yaw)
        if self.pong is not None and self.pong.active:
            self.pong = pong_step(self.pong, self.pong_config,
                                  self._state.phi, cfg.dt, self._rng)
            if dropped:
                self.pong.active = False   # game ends early on drop
        self._step_index += 1
        if dropped:
            self.status = DROPPED
        self.last_tick_ms = (time.perf_counter() - t0) * 1e3
        msg = {
            "type": "state",
            "step": self._step_index - 1,
            "phi": self._state.phi,
            "goal_raw": raw.yaw,
            "goal_sensed": sensed.yaw,
            "fingers": [{"s": float(s), "n": float(n)}
                        for s, n in zip(self._state.s, self._state.n)],
            "reward": reward,
            "dropped": dropped,
            "tick_ms": self.last_tick_ms,
        }
        return msg

    def pong_message(self) -> dict:
        p = self.pong
        return {"type": "pong", "ball": [p.ball_x, p.ball_y],
                "paddle_y": p.paddle_y, "hits": p.hits,
                "failures": p.failures,
                "status": "active" if p.active else "ended"}

    def summary(self) -> dict:
        if self.log is None or len(self.log) == 0:
            return {"mse": None, "sat": None, "drop": False}
        rec = TrajectoryFile.from_log(self.log, self.checkpoint.plant_config.K,
                                      {"kind": "session"}).record()
        return {"mse": mse(rec), "sat": saturation(rec),
                "drop": self.log.dropped}

    def finalize(self) -> Path | None:
        """Persist the log and end the session; returns the log path."""
        if self.log is None or len(self.log) == 0:
            self.status = ENDED
            return None
        self.log_dir.mkdir(parents=True, exist_ok=True)
        path = self.log_dir / f"session_{self.id}.csv"
        traj = TrajectoryFile.from_log(self.log, self.checkpoint.plant_config.K,
                                       {"kind": "session", "mode": self.mode,
                                        "sensor": self.sensor.kind,
                                        "seed": self.seed})
        write_trajectory(traj, path)
        self.log_path = path
        self.status = ENDED
        return path


def replay_goals(checkpoint: PolicyCheckpoint, goal_yaws, sensor: SensorModel,
                 seed: int = 0, mode: str = "free",
                 pong_config: PongConfig | None = None) -> tuple[EpisodeLog, Session]:
    """Headless replay: drive a Session through the given goal sequence,
    one tick per goal, on the same code path the live service uses."""
    session = Session(checkpoint, sensor=sensor, mode=mode, seed=seed,
                      pong_config=pong_config)
    session.control({"action": "start"})
    for yaw in goal_yaws:
        session.push_goal(float(yaw))
        session.tick()
        if session.status != RUNNING:
            break
    return session.log, session
