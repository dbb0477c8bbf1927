"""Policy checkpoint serialization.

A checkpoint is a single JSON document: a structured header (format
version, configs, layer sizes, normalizer statistics, seed lineage) plus
every parameter array embedded as base64-encoded little-endian float64
bytes, so round-trips are bit-exact.
"""

from __future__ import annotations

import base64
import json
from dataclasses import asdict, dataclass

import numpy as np

from ..plant import PlantConfig
from ..reward import RewardConfig
from .agent import DDPGAgent, TrainConfig
from .nets import RunningNormalizer

FORMAT_VERSION = 1


class CheckpointError(ValueError):
    """Unreadable, corrupt or incompatible checkpoint file."""


@dataclass
class PolicyCheckpoint:
    plant_config: PlantConfig
    reward_config: RewardConfig
    train_config: TrainConfig
    seed: int
    actor_params: list[np.ndarray]
    critic_params: list[np.ndarray]
    actor_target_params: list[np.ndarray]
    critic_target_params: list[np.ndarray]
    actor_sizes: list[int]
    critic_sizes: list[int]
    norm_total: np.ndarray
    norm_total_sq: np.ndarray
    norm_count: float

    @classmethod
    def from_agent(cls, agent: DDPGAgent, plant_config: PlantConfig,
                   reward_config: RewardConfig, seed: int) -> "PolicyCheckpoint":
        return cls(
            plant_config=plant_config,
            reward_config=reward_config,
            train_config=agent.config,
            seed=seed,
            actor_params=[p.copy() for p in agent.actor.params],
            critic_params=[p.copy() for p in agent.critic.params],
            actor_target_params=[p.copy() for p in agent.actor_target.params],
            critic_target_params=[p.copy() for p in agent.critic_target.params],
            actor_sizes=list(agent.actor.sizes),
            critic_sizes=list(agent.critic.sizes),
            norm_total=agent.normalizer.total.copy(),
            norm_total_sq=agent.normalizer.total_sq.copy(),
            norm_count=agent.normalizer.count,
        )

    def build_agent(self, rng: np.random.Generator | None = None) -> DDPGAgent:
        rng = rng or np.random.default_rng(self.seed)
        agent = DDPGAgent(self.plant_config.K, self.train_config, rng)
        if agent.actor.sizes != self.actor_sizes or agent.critic.sizes != self.critic_sizes:
            raise CheckpointError(
                f"checkpoint layer sizes {self.actor_sizes}/{self.critic_sizes} "
                f"do not match plant with K={self.plant_config.K}")
        agent.actor.set_params(self.actor_params)
        agent.critic.set_params(self.critic_params)
        agent.actor_target.set_params(self.actor_target_params)
        agent.critic_target.set_params(self.critic_target_params)
        norm = RunningNormalizer(agent.obs_dim, clip=self.train_config.normalizer_clip)
        norm.total = self.norm_total.copy()
        norm.total_sq = self.norm_total_sq.copy()
        norm.count = self.norm_count
        agent.normalizer = norm
        return agent


def _encode(arr: np.ndarray) -> dict:
    a = np.ascontiguousarray(arr, dtype="<f8")
    return {"shape": list(a.shape),
            "data": base64.b64encode(a.tobytes()).decode("ascii")}


def _decode(obj: dict) -> np.ndarray:
    raw = base64.b64decode(obj["data"])
    arr = np.frombuffer(raw, dtype="<f8").astype(np.float64)
    return arr.reshape(obj["shape"])


def save_checkpoint(ckpt: PolicyCheckpoint, path) -> None:
    doc = {
        "format": "yawbench-checkpoint",
        "version": FORMAT_VERSION,
        "plant_config": asdict(ckpt.plant_config),
        "reward_config": asdict(ckpt.reward_config),
        "train_config": asdict(ckpt.train_config),
        "seed": ckpt.seed,
        "actor_sizes": ckpt.actor_sizes,
        "critic_sizes": ckpt.critic_sizes,
        "actor_params": [_encode(p) for p in ckpt.actor_params],
        "critic_params": [_encode(p) for p in ckpt.critic_params],
        "actor_target_params": [_encode(p) for p in ckpt.actor_target_params],
        "critic_target_params": [_encode(p) for p in ckpt.critic_target_params],
        "normalizer": {"total": _encode(ckpt.norm_total),
                       "total_sq": _encode(ckpt.norm_total_sq),
                       "count": ckpt.norm_count},
    }
    with open(path, "w") as fh:
        json.dump(doc, fh)


def load_checkpoint(path) -> PolicyCheckpoint:
    try:
        with open(path) as fh:
            doc = json.load(fh)
    except (OSError, json.JSONDecodeError) as exc:
        raise CheckpointError(f"cannot read checkpoint {path}: {exc}") from exc
    if doc.get("format") != "yawbench-checkpoint":
        raise CheckpointError(f"{path} is not a policy checkpoint")
    if doc.get("version") != FORMAT_VERSION:
        raise CheckpointError(
            f"unsupported checkpoint version {doc.get('version')!r}")
    try:
        return PolicyCheckpoint(
            plant_config=PlantConfig(**doc["plant_config"]),
            reward_config=RewardConfig(**doc["reward_config"]),
            train_config=TrainConfig(**doc["train_config"]),
            seed=doc["seed"],
            actor_params=[_decode(p) for p in doc["actor_params"]],
            critic_params=[_decode(p) for p in doc["critic_params"]],
            actor_target_params=[_decode(p) for p in doc["actor_target_params"]],
            critic_target_params=[_decode(p) for p in doc["critic_target_params"]],
            actor_sizes=list(doc["actor_sizes"]),
            critic_sizes=list(doc["critic_sizes"]),
            norm_total=_decode(doc["normalizer"]["total"]),
            norm_total_sq=_decode(doc["normalizer"]["total_sq"]),
            norm_count=doc["normalizer"]["count"],
        )
    except (KeyError, TypeError) as exc:
        raise CheckpointError(f"malformed checkpoint {path}: {exc}") from exc
