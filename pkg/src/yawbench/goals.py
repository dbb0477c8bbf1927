"""End-effect goal sources and goal-sensor simulators.

Sources: uniform random goals for training, scripted sinusoid / step
trajectories for quantitative testing, and a zero-order-hold latch for
live streamed goals. Sensor models corrupt a streamed goal the way an
object-mounted inertial unit (drifting bias walk) or an overhead camera
(noisy but stable, with dropouts and quantization) would.
"""

from __future__ import annotations

import math
import threading
from dataclasses import dataclass

import numpy as np

from .core import Goal, wrap_angle

# Table-II style 2x2 parameter grid for sinusoid evaluation
SINE_GRID = [(0.5, 0.1), (0.5, 0.05), (1.0, 0.1), (1.0, 0.05)]


def random_goal(rng: np.random.Generator) -> Goal:
    """Uniform goal on (-pi, pi)."""
    return Goal(float(rng.uniform(-math.pi, math.pi)))


def sinusoid_goal(alpha: float, omega: float, i: int) -> Goal:
    """alpha * sin(omega * i), omega in rad/step."""
    if alpha <= 0 or omega <= 0:
        raise ValueError("sinusoid amplitude and frequency must be positive")
    return Goal(alpha * math.sin(omega * i))


def step_goal(i: int, magnitude: float = 1.0, onset: int = 50) -> Goal:
    """0 before the onset step, `magnitude` radians from it on."""
    if onset < 0:
        raise ValueError("onset must be >= 0")
    return Goal(magnitude if i >= onset else 0.0)


@dataclass(frozen=True)
class SensorModel:
    """Corruption model applied to the streamed goal angle."""

    kind: str = "ideal"         # "ideal" | "imu" | "camera"
    imu_bias_walk: float = 0.02     # rad/sqrt(s)
    imu_noise: float = 0.005        # rad
    camera_noise: float = 0.02      # rad
    camera_dropout: float = 0.02    # probability of holding the last output
    camera_quant: float = 0.005     # rad, output rounding

    def __post_init__(self):
        if self.kind not in ("ideal", "imu", "camera"):
            raise ValueError(f"unknown sensor kind {self.kind!r}")
        for name in ("imu_bias_walk", "imu_noise", "camera_noise",
                     "camera_quant"):
            if getattr(self, name) < 0:
                raise ValueError(f"{name} must be >= 0")
        if not 0 <= self.camera_dropout < 1:
            raise ValueError("dropout probability must be in [0, 1)")


class SensorSim:
    """Stateful simulator applying a SensorModel step by step."""

    def __init__(self, model: SensorModel, rng: np.random.Generator,
                 dt: float = 0.04):
        if dt <= 0:
            raise ValueError("dt must be positive")
        self.model = model
        self.rng = rng
        self.dt = dt
        self.bias = 0.0
        self.last_output: Goal | None = None

    def apply(self, truth: Goal) -> Goal:
        m = self.model
        if m.kind == "ideal":
            out = truth
        elif m.kind == "imu":
            self.bias += float(self.rng.normal(0.0, m.imu_bias_walk * math.sqrt(self.dt)))
            out = Goal(truth.yaw + self.bias + float(self.rng.normal(0.0, m.imu_noise)))
        else:  # camera
            if self.last_output is not None and float(self.rng.random()) < m.camera_dropout:
                out = self.last_output
            else:
                noisy = truth.yaw + float(self.rng.normal(0.0, m.camera_noise))
                if m.camera_quant > 0:
                    noisy = round(noisy / m.camera_quant) * m.camera_quant
                out = Goal(noisy)
        self.last_output = out
        return out


def apply_sensor(model: SensorModel, truth: Goal, rng: np.random.Generator,
                 dt: float = 0.04) -> Goal:
    """One-shot application of a sensor model (fresh internal state)."""
    return SensorSim(model, rng, dt).apply(truth)


class GoalLatch:
    """Single-writer / single-reader zero-order-hold goal latch.

    The network receiver calls push(); the control loop calls read() once
    per tick and always sees the most recent value pushed before that
    tick.
    """

    def __init__(self, initial: Goal):
        self._lock = threading.Lock()
        self._value = initial

    def push(self, goal: Goal):
        with self._lock:
            self._value = goal

    def read(self) -> Goal:
        with self._lock:
            return self._value


def stream_goal(latest_received: Goal | None, previous: Goal) -> Goal:
    """Zero-order hold: latest received goal if any, else the previous."""
    return previous if latest_received is None else latest_received


__all__ = [
    "SINE_GRID", "random_goal", "sinusoid_goal", "step_goal",
    "SensorModel", "SensorSim", "apply_sensor", "GoalLatch", "stream_goal",
    "wrap_angle",
]
