"""Hand-written finger-gaiting controller.

Each finger cycles independently through push -> release -> return ->
push. First-cycle release thresholds are staggered so fingers fall out
of lockstep, and a grip gate never lets so many fingers release at once
that the disk would drop. Serves as a learning-free baseline and as an
independent check on the success evaluator.
"""

from __future__ import annotations

import numpy as np

from .core import Goal, wrap_angle
from .plant import PlantConfig, PlantState

PUSH, RELEASE, RETURN = 0, 1, 2


class GaitingController:
    """Stateful controller; call reset() between episodes."""

    def __init__(self, config: PlantConfig, speed_cap: float = 1.0):
        self.config = config
        self.speed_cap = speed_cap
        self.reset()

    def reset(self):
        k = self.config.K
        self.roles = np.full(k, PUSH)
        # staggered first-cycle thresholds break the initial symmetry
        self.release_at = np.linspace(0.35, 0.8, k) * self.config.L

    def __call__(self, obs: np.ndarray, state: PlantState,
                 goal: Goal) -> np.ndarray:
        cfg = self.config
        k = cfg.K
        action = np.zeros(2 * k)
        err = wrap_angle(goal.yaw - state.phi)

        # brake early enough that full-grip friction stops on the goal
        decel = k * cfg.mu * cfg.F_max * cfg.r ** 2 / cfg.J * 0.8
        stop_dist = state.phidot ** 2 / (2.0 * decel)
        if abs(err) < 0.02 or (err * np.sign(state.phidot) >= 0
                               and stop_dist >= abs(err)):
            action[k:] = 1.0   # grip hard, hold still: friction brakes
            self.roles[:] = PUSH
            self.release_at[:] = 0.8 * cfg.L
            return action

        direction = 1.0 if err > 0 else -1.0
        speed = direction * min(self.speed_cap,
                                max(0.15, 2.0 * abs(err) / cfg.v_max))

        for i in range(k):
            if self.roles[i] == RELEASE and state.n[i] < cfg.n_c:
                self.roles[i] = RETURN
            if self.roles[i] == RETURN and direction * state.s[i] < -0.7 * cfg.L:
                self.roles[i] = PUSH
                self.release_at[i] = 0.8 * cfg.L

        # railed pushers want to recycle, but only while enough grip stays
        railed = [i for i in range(k)
                  if self.roles[i] == PUSH
                  and direction * state.s[i] > self.release_at[i]]
        railed.sort(key=lambda i: -direction * state.s[i])
        for i in railed:
            holders = sum(1 for j in range(k)
                          if j != i and self.roles[j] == PUSH and state.n[j] > 0.5)
            if holders >= 2:
                self.roles[i] = RELEASE

        for i in range(k):
            if self.roles[i] == PUSH:
                action[k + i] = 1.0
                # fully railed fingers waiting for the grip gate hold on
                action[i] = 0.0 if direction * state.s[i] > 0.95 * cfg.L else speed
            elif self.roles[i] == RELEASE:
                action[k + i] = -1.0
            else:  # RETURN: disengaged, reposition at full speed
                action[k + i] = -1.0
                action[i] = -direction
        return action
