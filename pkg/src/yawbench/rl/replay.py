"""Replay buffer and hindsight goal relabeling."""

from __future__ import annotations

from dataclasses import replace

import numpy as np

from ..core import Goal, Transition, yaw_from_observation
from ..reward import RewardConfig, compute_reward


def her_relabel(episode: list[Transition], k: int,
                reward_config: RewardConfig, rng: np.random.Generator,
                num_fingers: int) -> list[Transition]:
    """Original transitions plus k hindsight copies per step.

    Each copy replaces the goal with the achieved goal of a uniformly
    sampled future step of the same episode and recomputes the reward.
    The goal quaternion slots of obs/next_obs are rewritten to match.
    """
    if not episode:
        raise ValueError("cannot relabel an empty episode")
    if k < 0:
        raise ValueError("k must be >= 0")
    out = list(episode)
    n = len(episode)
    base = 4 * num_fingers
    for i, tr in enumerate(episode):
        for _ in range(k):
            future = int(rng.integers(i, n))
            new_goal = episode[future].achieved_goal
            obs = tr.obs.copy()
            next_obs = tr.next_obs.copy()
            obs[base + 16:base + 20] = new_goal.quat
            next_obs[base + 16:base + 20] = new_goal.quat
            reward = compute_reward(reward_config, tr.achieved_goal,
                                    new_goal, tr.dropped)
            out.append(replace(tr, obs=obs, next_obs=next_obs,
                               goal=new_goal, reward=reward))
    return out


class ReplayBuffer:
    """FIFO transition store with uniform sampling.

    Backed by preallocated flat arrays rather than a list of transition
    objects: at the default 10^6 capacity, object storage both triples
    the memory footprint and drags every generational garbage-collection
    pass through a million live records.
    """

    def __init__(self, capacity: int, rng: np.random.Generator):
        if capacity < 1:
            raise ValueError("capacity must be >= 1")
        self.capacity = capacity
        self.rng = rng
        self._size = 0
        self._next = 0
        self._arrays: dict[str, np.ndarray] | None = None

    def __len__(self):
        return self._size

    def _allocate(self, tr: Transition):
        cap = self.capacity
        self._arrays = {
            "obs": np.empty((cap, tr.obs.size)),
            "action": np.empty((cap, tr.action.size)),
            "reward": np.empty(cap),
            "next_obs": np.empty((cap, tr.next_obs.size)),
            "goal": np.empty(cap),
            "achieved": np.empty(cap),
            "done": np.empty(cap, dtype=bool),
            "dropped": np.empty(cap, dtype=bool),
        }

    def add(self, transitions: list[Transition]):
        for tr in transitions:
            if self._arrays is None:
                self._allocate(tr)
            a = self._arrays
            i = self._next
            a["obs"][i] = tr.obs
            a["action"][i] = tr.action
            a["reward"][i] = tr.reward
            a["next_obs"][i] = tr.next_obs
            a["goal"][i] = tr.goal.yaw
            a["achieved"][i] = tr.achieved_goal.yaw
            a["done"][i] = tr.done
            a["dropped"][i] = tr.dropped
            self._next = (i + 1) % self.capacity
            self._size = min(self._size + 1, self.capacity)

    def sample_arrays(self, batch_size: int) -> dict[str, np.ndarray]:
        """Batch as stacked arrays (obs, action, reward, next_obs)."""
        if self._size == 0:
            raise RuntimeError("cannot sample from an empty buffer")
        idx = self.rng.integers(0, self._size, size=batch_size)
        a = self._arrays
        return {"obs": a["obs"][idx], "action": a["action"][idx],
                "reward": a["reward"][idx], "next_obs": a["next_obs"][idx]}

    def sample(self, batch_size: int) -> list[Transition]:
        if self._size == 0:
            raise RuntimeError("cannot sample from an empty buffer")
        idx = self.rng.integers(0, self._size, size=batch_size)
        a = self._arrays
        return [Transition(obs=a["obs"][i].copy(),
                           action=a["action"][i].copy(),
                           reward=float(a["reward"][i]),
                           next_obs=a["next_obs"][i].copy(),
                           goal=Goal(float(a["goal"][i])),
                           achieved_goal=Goal(float(a["achieved"][i])),
                           done=bool(a["done"][i]),
                           dropped=bool(a["dropped"][i]))
                for i in idx]


def achieved_from_next_obs(next_obs: np.ndarray, num_fingers: int) -> Goal:
    """Achieved goal read back from the object quaternion in next_obs."""
    return Goal(yaw_from_observation(next_obs, num_fingers))
