"""Finger-gaiting rotation plant.

K fingertips grip the rim of a disk and rotate it about its axis by
coordinated engage / stroke / release cycles. Fingers have finite
tangential travel, so sustained rotation requires gaiting. Losing grip
(total engagement below a threshold for several consecutive steps) drops
the disk and ends the episode in failure.
"""

from __future__ import annotations

from dataclasses import dataclass, field, replace

import numpy as np

from .core import Goal, angular_distance, wrap_angle


@dataclass(frozen=True)
class PlantConfig:
    K: int = 5              # finger count
    L: float = 0.6          # finger travel limit, rim-arc units
    v_max: float = 1.5      # max tangential speed, units/s
    n_rate: float = 6.0     # max engagement rate, 1/s
    n_c: float = 0.1        # contact threshold on engagement
    mu: float = 1.0         # friction coefficient
    F_max: float = 2.0      # max normal force
    v_slip: float = 0.5     # slip-regularization velocity, units/s
    r: float = 1.0          # disk radius
    J: float = 1.0          # disk yaw inertia
    b: float = 0.5          # viscous damping
    n_drop: float = 0.5     # minimum total engagement before drop counting
    T_drop: int = 5         # consecutive under-grip steps before drop
    dt: float = 0.04        # timestep, s
    horizon: int = 100      # steps per episode
    n_init: float = 0.8     # engagement at reset

    def __post_init__(self):
        for name in ("L", "v_max", "n_rate", "n_c", "mu", "F_max",
                     "v_slip", "r", "J", "b", "n_drop", "dt"):
            if getattr(self, name) <= 0:
                raise ValueError(f"{name} must be positive")
        if self.K < 1 or self.T_drop < 1 or self.horizon < 1:
            raise ValueError("K, T_drop and horizon must be >= 1")
        if self.n_c >= 1:
            raise ValueError("contact threshold must be below 1")


@dataclass
class PlantState:
    phi: float              # object yaw, wrapped
    phidot: float           # rad/s
    s: np.ndarray           # K tangential positions in [-L, L]
    n: np.ndarray           # K engagements in [0, 1]
    s_dot: np.ndarray       # realized tangential velocities, units/s
    n_dot: np.ndarray       # realized engagement rates, 1/s
    under_grip_steps: int = 0
    dropped: bool = False

    def copy(self) -> "PlantState":
        return replace(self, s=self.s.copy(), n=self.n.copy(),
                       s_dot=self.s_dot.copy(), n_dot=self.n_dot.copy())


class DroppedStateError(RuntimeError):
    """Raised when stepping a plant whose object has already dropped."""


def reset(config: PlantConfig, rng: np.random.Generator,
          initial_yaw_range: tuple[float, float] = (-np.pi, np.pi)) -> PlantState:
    """Fresh state with yaw uniform in `initial_yaw_range`, at rest, all
    fingers engaged at n_init and centered."""
    lo, hi = initial_yaw_range
    if lo > hi:
        raise ValueError(f"empty initial yaw range ({lo}, {hi})")
    phi = wrap_angle(float(rng.uniform(lo, hi)) if hi > lo else lo)
    k = config.K
    return PlantState(phi=phi, phidot=0.0,
                      s=np.zeros(k), n=np.full(k, config.n_init),
                      s_dot=np.zeros(k), n_dot=np.zeros(k))


def step(config: PlantConfig, state: PlantState,
         action: np.ndarray) -> tuple[PlantState, bool]:
    """Advance the plant one timestep under a 2K action vector.

    Action layout: entries [0:K] are tangential-velocity commands,
    entries [K:2K] are engagement-rate commands, each in [-1, 1]
    (clamped defensively). Semi-implicit Euler; fingers at their travel
    limit produce no drive because their realized velocity is zero.
    """
    if state.dropped:
        raise DroppedStateError("cannot step a dropped plant state")
    a = np.clip(np.asarray(action, dtype=float), -1.0, 1.0)
    k = config.K
    if a.shape != (2 * k,):
        raise ValueError(f"action must have shape ({2 * k},), got {a.shape}")
    dt = config.dt

    a_s, a_n = a[:k], a[k:]
    n_new = np.clip(state.n + a_n * config.n_rate * dt, 0.0, 1.0)
    n_dot = (n_new - state.n) / dt

    s_new = np.clip(state.s + a_s * config.v_max * dt, -config.L, config.L)
    v = (s_new - state.s) / dt  # realized velocity: zero when railed

    in_contact = n_new >= config.n_c
    slip = np.clip((v - config.r * state.phidot) / config.v_slip, -1.0, 1.0)
    force = np.where(in_contact, config.mu * n_new * config.F_max * slip, 0.0)
    torque = config.r * float(np.sum(force))

    phidot_new = state.phidot + dt * (torque - config.b * state.phidot) / config.J
    phi_new = wrap_angle(state.phi + dt * phidot_new)

    if float(np.sum(n_new)) < config.n_drop:
        under = state.under_grip_steps + 1
    else:
        under = 0
    dropped = under >= config.T_drop

    next_state = PlantState(phi=phi_new, phidot=phidot_new, s=s_new,
                            n=n_new, s_dot=v, n_dot=n_dot,
                            under_grip_steps=under, dropped=dropped)
    return next_state, dropped


def is_success(state: PlantState, goal: Goal, tolerance: float) -> bool:
    if tolerance <= 0:
        raise ValueError("tolerance must be positive")
    if state.dropped:
        return False
    return angular_distance(state.phi, goal.yaw) < tolerance
