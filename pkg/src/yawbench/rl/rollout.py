"""Episode rollout helpers shared by training, evaluation and replay."""

from __future__ import annotations

from typing import Callable

import numpy as np

from .. import plant as plant_mod
from ..core import EpisodeLog, Goal, Transition, build_observation
from ..plant import PlantConfig, PlantState
from ..reward import RewardConfig, compute_reward

# policy: (obs, state, goal) -> action; plain agents ignore state/goal
Policy = Callable[[np.ndarray, PlantState, Goal], np.ndarray]


def rollout_episode(plant_config: PlantConfig, reward_config: RewardConfig,
                    policy: Policy, goal: Goal, rng: np.random.Generator,
                    initial_yaw_range: tuple[float, float] = (-np.pi, np.pi),
                    goal_schedule: Callable[[int], Goal] | None = None,
                    ) -> tuple[list[Transition], EpisodeLog, PlantState]:
    """Run one fixed-horizon episode.

    With a `goal_schedule` the goal is re-read every step (scripted
    trajectories); otherwise the single `goal` holds for the episode.
    The episode ends early only on drop.
    """
    state = plant_mod.reset(plant_config, rng, initial_yaw_range)
    log = EpisodeLog(dt=plant_config.dt)
    transitions: list[Transition] = []
    for i in range(plant_config.horizon):
        g = goal_schedule(i) if goal_schedule is not None else goal
        obs = build_observation(state, g)
        action = np.clip(policy(obs, state, g), -1.0, 1.0)
        next_state, dropped = plant_mod.step(plant_config, state, action)
        achieved = Goal(next_state.phi)
        reward = compute_reward(reward_config, achieved, g, dropped)
        next_obs = build_observation(next_state, g)
        done = dropped or i == plant_config.horizon - 1
        transitions.append(Transition(obs=obs, action=action, reward=reward,
                                      next_obs=next_obs, goal=g,
                                      achieved_goal=achieved, done=done,
                                      dropped=dropped))
        log.append(i, next_state.phi, g.yaw, action, reward, dropped)
        state = next_state
        if dropped:
            break
    return transitions, log, state
