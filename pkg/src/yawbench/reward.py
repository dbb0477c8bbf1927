"""Sparse and dense reward functions over yaw goals.

Sparse pays 0 within a 0.1 rad tolerance and -1 otherwise. Dense adds a
continuous negative angular-distance term (computed through quaternions)
to the binary term, with a tighter 0.05 rad tolerance. A dropped object
always counts as failure.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .core import Goal

SPARSE_TOLERANCE = 0.1
DENSE_TOLERANCE = 0.05


@dataclass(frozen=True)
class RewardConfig:
    kind: str = "dense"     # "sparse" | "dense"
    tolerance: float = DENSE_TOLERANCE

    def __post_init__(self):
        if self.kind not in ("sparse", "dense"):
            raise ValueError(f"unknown reward kind {self.kind!r}")
        if self.tolerance <= 0:
            raise ValueError("tolerance must be positive")

    @classmethod
    def sparse(cls) -> "RewardConfig":
        return cls(kind="sparse", tolerance=SPARSE_TOLERANCE)

    @classmethod
    def dense(cls) -> "RewardConfig":
        return cls(kind="dense", tolerance=DENSE_TOLERANCE)


def _quat_distance(achieved: Goal, goal: Goal) -> float:
    dot = abs(float(np.dot(achieved.quat, goal.quat)))
    return 2.0 * math.acos(min(dot, 1.0))


def _binary(achieved: Goal, goal: Goal, dropped: bool, tolerance: float) -> float:
    if dropped:
        return -1.0
    return 0.0 if _quat_distance(achieved, goal) < tolerance else -1.0


def sparse_reward(achieved: Goal, goal: Goal, dropped: bool = False,
                  tolerance: float = SPARSE_TOLERANCE) -> float:
    return _binary(achieved, goal, dropped, tolerance)


def dense_reward(achieved: Goal, goal: Goal, dropped: bool = False,
                 tolerance: float = DENSE_TOLERANCE) -> float:
    return -_quat_distance(achieved, goal) + _binary(achieved, goal, dropped, tolerance)


def compute_reward(config: RewardConfig, achieved: Goal, goal: Goal,
                   dropped: bool = False) -> float:
    if config.kind == "sparse":
        return sparse_reward(achieved, goal, dropped, config.tolerance)
    return dense_reward(achieved, goal, dropped, config.tolerance)
