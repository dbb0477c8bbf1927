"""Goal-conditioned deterministic actor-critic training with hindsight
replay, plus checkpointing and success-rate evaluation."""

from .agent import DDPGAgent, TrainConfig
from .checkpoint import (CheckpointError, PolicyCheckpoint, load_checkpoint,
                         save_checkpoint)
from .nets import MLP, Adam, RunningNormalizer
from .replay import ReplayBuffer, her_relabel
from .rollout import rollout_episode
from .train import evaluate_policy_success, evaluate_success_rate, train

__all__ = [
    "DDPGAgent", "TrainConfig", "MLP", "Adam", "RunningNormalizer",
    "ReplayBuffer", "her_relabel", "rollout_episode",
    "PolicyCheckpoint", "CheckpointError", "save_checkpoint",
    "load_checkpoint", "train", "evaluate_success_rate",
    "evaluate_policy_success",
]
