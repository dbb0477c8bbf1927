"""Shared domain types and yaw-angle arithmetic.

Everything here is a pure value type or a pure function; instances are
safe to share across threads.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

TWO_PI = 2.0 * math.pi


def wrap_angle(raw: float) -> float:
    """Wrap an angle in radians to the interval (-pi, pi].

    The boundary maps -pi to +pi so every rotation has exactly one
    representative.
    """
    if not math.isfinite(raw):
        raise ValueError(f"angle must be finite, got {raw!r}")
    wrapped = raw - TWO_PI * math.floor((raw + math.pi) / TWO_PI)
    if wrapped <= -math.pi:
        wrapped = math.pi
    return wrapped


def yaw_to_quaternion(yaw: float) -> np.ndarray:
    """Unit quaternion (w, x, y, z) for a rotation of `yaw` about Z."""
    half = 0.5 * yaw
    return np.array([math.cos(half), 0.0, 0.0, math.sin(half)])


def quaternion_to_yaw(quat: np.ndarray) -> float:
    """Inverse of yaw_to_quaternion for yaw-only quaternions."""
    w, _, _, z = quat
    return wrap_angle(2.0 * math.atan2(z, w))


def angular_distance(a: float, b: float) -> float:
    """Minimal angular distance between two yaw angles, in [0, pi].

    Computed through the quaternion representation: the absolute dot
    product of the two unit quaternions is cos(d/2) where d is the
    geodesic distance.
    """
    qa = yaw_to_quaternion(a)
    qb = yaw_to_quaternion(b)
    dot = abs(float(np.dot(qa, qb)))
    return 2.0 * math.acos(min(dot, 1.0))


@dataclass(frozen=True)
class Goal:
    """Target yaw, carried both as an angle and a Z-axis quaternion."""

    yaw: float

    def __post_init__(self):
        object.__setattr__(self, "yaw", wrap_angle(self.yaw))

    @property
    def quat(self) -> np.ndarray:
        return yaw_to_quaternion(self.yaw)


def observation_size(num_fingers: int) -> int:
    """Length of the flat observation vector: 4K finger slots + 13
    object-state slots + 7 goal slots."""
    return 4 * num_fingers + 20


def build_observation(state, goal: Goal) -> np.ndarray:
    """Assemble the flat policy input from a plant state and a goal.

    Layout (K fingers): K tangential positions, K engagements,
    K tangential velocities, K engagement rates, then 13 object values
    (3 Cartesian position, 4 quaternion, 3 linear velocity, 3 angular
    velocity) and 7 goal values (3 Cartesian position, 4 quaternion).
    The Cartesian and linear-velocity slots are structurally present but
    constant for this single-axis plant.
    """
    k = len(state.s)
    obs = np.zeros(observation_size(k))
    obs[0:k] = state.s
    obs[k:2 * k] = state.n
    obs[2 * k:3 * k] = state.s_dot
    obs[3 * k:4 * k] = state.n_dot
    base = 4 * k
    # object: position (constant origin), quaternion, linear vel (zero),
    # angular vel (Z only)
    obs[base + 3:base + 7] = yaw_to_quaternion(state.phi)
    obs[base + 12] = state.phidot
    # goal: position mirrored from object (origin), quaternion
    obs[base + 16:base + 20] = goal.quat
    return obs


def yaw_from_observation(obs: np.ndarray, num_fingers: int) -> float:
    """Extract the object yaw embedded in an observation."""
    base = 4 * num_fingers
    return quaternion_to_yaw(obs[base + 3:base + 7])


@dataclass
class Transition:
    """Replay-buffer unit for goal-conditioned learning."""

    obs: np.ndarray
    action: np.ndarray
    reward: float
    next_obs: np.ndarray
    goal: Goal
    achieved_goal: Goal
    done: bool
    dropped: bool = False


@dataclass
class EpisodeLog:
    """Per-step trajectory record of one rollout.

    phi/goal are radians; actions is an (n_steps, 2K) matrix in [-1, 1].
    """

    dt: float = 0.04
    steps: list = field(default_factory=list)

    def append(self, index: int, phi: float, goal: float,
               action: np.ndarray, reward: float, dropped: bool,
               goal_raw: float | None = None):
        if self.steps and index <= self.steps[-1][0]:
            raise ValueError("step indices must be strictly increasing")
        raw = goal if goal_raw is None else goal_raw
        self.steps.append((index, phi, goal, np.asarray(action, dtype=float),
                           reward, dropped, raw))

    def __len__(self):
        return len(self.steps)

    @property
    def phi(self) -> np.ndarray:
        return np.array([s[1] for s in self.steps])

    @property
    def goal(self) -> np.ndarray:
        return np.array([s[2] for s in self.steps])

    @property
    def goal_raw(self) -> np.ndarray:
        return np.array([s[6] for s in self.steps])

    @property
    def actions(self) -> np.ndarray:
        return np.array([s[3] for s in self.steps])

    @property
    def rewards(self) -> np.ndarray:
        return np.array([s[4] for s in self.steps])

    @property
    def dropped(self) -> bool:
        return bool(self.steps and self.steps[-1][5])
