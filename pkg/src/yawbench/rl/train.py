"""Epoch-structured offline training and success-rate evaluation."""

from __future__ import annotations

from typing import Callable

import numpy as np

from ..core import Goal
from ..goals import random_goal
from ..plant import PlantConfig
from ..reward import RewardConfig
from .agent import DDPGAgent, TrainConfig
from .checkpoint import PolicyCheckpoint
from .replay import ReplayBuffer, her_relabel
from .rollout import rollout_episode


def evaluate_policy_success(policy, plant_config: PlantConfig,
                            reward_config: RewardConfig, trials: int,
                            seed: int,
                            reset_hook: Callable[[], None] | None = None) -> float:
    """Fraction of noise-free episodes ending within tolerance.

    Each trial draws a fresh random initial yaw and random goal; success
    is judged at the final step only.
    """
    rng = np.random.default_rng(seed)
    wins = 0
    for _ in range(trials):
        if reset_hook is not None:
            reset_hook()
        goal = random_goal(rng)
        transitions, _, _ = rollout_episode(plant_config, reward_config,
                                            policy, goal, rng)
        last = transitions[-1]
        if (not last.dropped
                and abs_distance(last.achieved_goal, goal) < reward_config.tolerance):
            wins += 1
    return wins / trials


def abs_distance(a: Goal, b: Goal) -> float:
    from ..core import angular_distance
    return angular_distance(a.yaw, b.yaw)


def evaluate_success_rate(agent: DDPGAgent, plant_config: PlantConfig,
                          reward_config: RewardConfig, trials: int = 50,
                          seed: int = 0) -> float:
    def policy(obs, state, goal):
        return agent.act(obs)
    return evaluate_policy_success(policy, plant_config, reward_config,
                                   trials, seed)


def train(plant_config: PlantConfig, reward_config: RewardConfig,
          train_config: TrainConfig, seed: int = 0,
          progress: Callable[[int, float], None] | None = None,
          snapshot: Callable[[int, PolicyCheckpoint, list[float]], None]
          | None = None) -> tuple[PolicyCheckpoint, list[float]]:
    """Full offline training run.

    Returns the final checkpoint and the per-epoch validation success
    rates. Deterministic for a fixed seed. ``snapshot``, when given, is
    called after every epoch with the epoch index, a checkpoint of the
    current agent, and the success log so far, so multi-hour runs can
    persist progress; the agent state after epoch N is identical to a
    run configured with ``epochs=N+1``.
    """
    rng = np.random.default_rng(seed)
    agent = DDPGAgent(plant_config.K, train_config, rng)
    buffer = ReplayBuffer(train_config.buffer_capacity,
                          np.random.default_rng(rng.integers(2**63)))
    eval_seed_base = int(rng.integers(2**31))
    success_log: list[float] = []

    from ..gaiting import GaitingController
    controller = GaitingController(plant_config)

    if train_config.demo_episodes and train_config.epochs:
        _seed_with_demonstrations(buffer, controller, plant_config,
                                  reward_config, train_config, rng)

    def scripted_policy(obs, state, g):
        return controller(obs, state, g)

    for epoch in range(train_config.epochs):
        for _ in range(train_config.cycles_per_epoch):
            for _ in range(train_config.episodes_per_cycle):
                goal = random_goal(rng)

                # a small fraction of behavior episodes come from the
                # scripted controller so regrasp sequences stay present
                # in the FIFO buffer for the whole run
                if rng.random() < train_config.demo_mix:
                    controller.reset()
                    policy = scripted_policy
                else:
                    def policy(obs, state, g):
                        return agent.act_exploring(obs, rng)

                episode, _, _ = rollout_episode(plant_config, reward_config,
                                                policy, goal, rng)
                relabeled = her_relabel(episode, train_config.her_k,
                                        reward_config, rng, plant_config.K)
                buffer.add(relabeled)
            for _ in range(train_config.updates_per_cycle):
                agent.update(buffer)
            agent.check_finite()
        rate = evaluate_success_rate(agent, plant_config, reward_config,
                                     trials=train_config.eval_trials,
                                     seed=eval_seed_base + epoch)
        success_log.append(rate)
        if progress is not None:
            progress(epoch, rate)
        if snapshot is not None:
            snapshot(epoch,
                     PolicyCheckpoint.from_agent(agent, plant_config,
                                                 reward_config, seed),
                     success_log)

    ckpt = PolicyCheckpoint.from_agent(agent, plant_config, reward_config, seed)
    return ckpt, success_log


def _seed_with_demonstrations(buffer: ReplayBuffer, controller,
                              plant_config: PlantConfig,
                              reward_config: RewardConfig,
                              train_config: TrainConfig,
                              rng: np.random.Generator) -> None:
    """Fill the replay buffer with scripted finger-gaiting episodes.

    The learner stays plain off-policy DDPG+HER; only the behavior
    policy for these warm-up episodes is the scripted controller, which
    exposes the regrasp cycle that undirected exploration discovers very
    slowly.
    """
    def policy(obs, state, g):
        return controller(obs, state, g)

    for _ in range(train_config.demo_episodes):
        controller.reset()
        goal = random_goal(rng)
        episode, _, _ = rollout_episode(plant_config, reward_config, policy,
                                        goal, rng)
        buffer.add(her_relabel(episode, train_config.her_k, reward_config,
                               rng, plant_config.K))
