"""Deterministic actor-critic agent with target networks.

The critic regresses to clipped one-step bootstrap targets; the actor
ascends the critic. Target networks track the live ones through polyak
averaging. Observations are standardized by a running normalizer whose
statistics grow with the data the agent trains on.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from ..core import observation_size
from .nets import MLP, Adam, RunningNormalizer
from .replay import ReplayBuffer, Transition


@dataclass(frozen=True)
class TrainConfig:
    epochs: int = 200
    cycles_per_epoch: int = 50
    episodes_per_cycle: int = 2
    updates_per_cycle: int = 40
    batch_size: int = 256
    gamma: float = 0.98
    polyak: float = 0.95
    actor_lr: float = 1e-3
    critic_lr: float = 1e-3
    noise_sigma: float = 0.2
    random_action_prob: float = 0.3
    her_k: int = 4
    buffer_capacity: int = 1_000_000
    hidden: int = 128
    normalizer_clip: float = 5.0
    action_l2: float = 1.0
    demo_episodes: int = 200
    demo_mix: float = 0.2
    eval_trials: int = 50

    def __post_init__(self):
        if not 0.0 <= self.gamma <= 1.0:
            raise ValueError("gamma must be in [0, 1]")
        if not 0.0 <= self.polyak <= 1.0:
            raise ValueError("polyak must be in [0, 1]")
        for name in ("cycles_per_epoch", "episodes_per_cycle",
                     "updates_per_cycle", "batch_size", "buffer_capacity",
                     "hidden", "eval_trials"):
            if getattr(self, name) < 1:
                raise ValueError(f"{name} must be >= 1")
        if self.epochs < 0 or self.her_k < 0 or self.demo_episodes < 0:
            raise ValueError("epochs, her_k and demo_episodes must be >= 0")
        if not 0.0 <= self.demo_mix <= 1.0:
            raise ValueError("demo_mix must be in [0, 1]")


class DDPGAgent:
    def __init__(self, num_fingers: int, config: TrainConfig,
                 rng: np.random.Generator):
        self.num_fingers = num_fingers
        self.config = config
        self.obs_dim = observation_size(num_fingers)
        self.act_dim = 2 * num_fingers
        h = config.hidden
        self.actor = MLP([self.obs_dim, h, h, h, self.act_dim],
                         out_activation="tanh", rng=rng)
        self.critic = MLP([self.obs_dim + self.act_dim, h, h, h, 1], rng=rng)
        self.actor_target = self.actor.copy()
        self.critic_target = self.critic.copy()
        self.actor_opt = Adam(self.actor.params, lr=config.actor_lr)
        self.critic_opt = Adam(self.critic.params, lr=config.critic_lr)
        self.normalizer = RunningNormalizer(self.obs_dim,
                                            clip=config.normalizer_clip)

    def act(self, obs: np.ndarray) -> np.ndarray:
        """Noise-free policy action for a single observation."""
        x = self.normalizer.normalize(obs)
        return self.actor.forward(x)[0]

    def act_exploring(self, obs: np.ndarray,
                      rng: np.random.Generator) -> np.ndarray:
        """Training-time action: Gaussian noise plus epsilon-uniform mix."""
        cfg = self.config
        if rng.random() < cfg.random_action_prob:
            return rng.uniform(-1.0, 1.0, size=self.act_dim)
        a = self.act(obs) + rng.normal(0.0, cfg.noise_sigma, size=self.act_dim)
        return np.clip(a, -1.0, 1.0)

    def update(self, buffer: ReplayBuffer) -> dict:
        """One gradient update of critic then actor from a sampled batch."""
        if len(buffer) == 0:
            raise RuntimeError("cannot update from an empty buffer")
        cfg = self.config
        batch = buffer.sample_arrays(cfg.batch_size)
        obs = batch["obs"]
        next_obs = batch["next_obs"]
        actions = batch["action"]
        rewards = batch["reward"][:, None]

        self.normalizer.update(obs)
        o = self.normalizer.normalize(obs)
        o2 = self.normalizer.normalize(next_obs)

        # critic: clipped bootstrap target
        a2 = self.actor_target.forward(o2)
        q_next = self.critic_target.forward(np.concatenate([o2, a2], axis=1))
        target = rewards + cfg.gamma * q_next
        if cfg.gamma < 1.0:
            target = np.clip(target, -1.0 / (1.0 - cfg.gamma), 0.0)
        else:
            target = np.minimum(target, 0.0)

        q = self.critic.forward(np.concatenate([o, actions], axis=1), cache=True)
        batch_n = q.shape[0]
        critic_loss = float(np.mean((q - target) ** 2))
        grad_q = 2.0 * (q - target) / batch_n
        critic_grads, _ = self.critic.backward(grad_q)
        self.critic_opt.step(self.critic.params, critic_grads)

        # actor: ascend Q(s, actor(s)) with a quadratic action penalty
        a_pred = self.actor.forward(o, cache=True)
        self.critic.forward(np.concatenate([o, a_pred], axis=1), cache=True)
        grad_ones = -np.ones((batch_n, 1)) / batch_n
        _, grad_in = self.critic.backward(grad_ones)
        grad_action = grad_in[:, self.obs_dim:]
        grad_action = grad_action + cfg.action_l2 * 2.0 * a_pred / a_pred.size
        actor_grads, _ = self.actor.backward(grad_action)
        self.actor_opt.step(self.actor.params, actor_grads)

        self._soft_update(self.actor_target, self.actor)
        self._soft_update(self.critic_target, self.critic)
        return {"critic_loss": critic_loss,
                "actor_q": float(np.mean(q))}

    def _soft_update(self, target: MLP, source: MLP):
        tau = self.config.polyak
        for pt, ps in zip(target.params, source.params):
            pt *= tau
            pt += (1.0 - tau) * ps

    def check_finite(self):
        for p in self.actor.params + self.critic.params:
            if not np.all(np.isfinite(p)):
                raise FloatingPointError(
                    "non-finite network parameter encountered during training")
