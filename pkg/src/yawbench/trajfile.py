"""Trajectory file I/O.

One run per file: comment-prefixed self-describing header (dt, finger
count, goal-source parameters), then one comma-separated row per step
with index, raw and sensed goal, actual yaw, reward, drop flag and the
action vector. The same files feed offline metrics and headless replay.
"""

from __future__ import annotations

import csv
from dataclasses import dataclass, field

import numpy as np

from .core import EpisodeLog
from .metrics import TrajectoryRecord

MAGIC = "yawbench-trajectory"
VERSION = 1


class TrajectoryFileError(ValueError):
    pass


@dataclass
class TrajectoryFile:
    dt: float
    num_fingers: int
    source: dict = field(default_factory=dict)   # goal-source parameters
    index: np.ndarray = None
    goal_raw: np.ndarray = None
    goal: np.ndarray = None
    phi: np.ndarray = None
    reward: np.ndarray = None
    dropped: np.ndarray = None
    actions: np.ndarray = None

    @classmethod
    def from_log(cls, log: EpisodeLog, num_fingers: int,
                 source: dict | None = None) -> "TrajectoryFile":
        return cls(dt=log.dt, num_fingers=num_fingers, source=dict(source or {}),
                   index=np.array([s[0] for s in log.steps]),
                   goal_raw=log.goal_raw, goal=log.goal, phi=log.phi,
                   reward=log.rewards,
                   dropped=np.array([s[5] for s in log.steps], dtype=bool),
                   actions=log.actions)

    def record(self) -> TrajectoryRecord:
        return TrajectoryRecord(dt=self.dt, goal=self.goal, phi=self.phi,
                                actions=self.actions)


def write_trajectory(traj: TrajectoryFile, path) -> None:
    m = traj.actions.shape[1]
    with open(path, "w", newline="") as fh:
        fh.write(f"# {MAGIC} v{VERSION}\n")
        fh.write(f"# dt={traj.dt!r} K={traj.num_fingers}\n")
        if traj.source:
            pairs = " ".join(f"{k}={v!r}" for k, v in sorted(traj.source.items()))
            fh.write(f"# source {pairs}\n")
        writer = csv.writer(fh)
        writer.writerow(["index", "goal_raw", "goal", "phi", "reward", "dropped"]
                        + [f"a{j}" for j in range(m)])
        for i in range(len(traj.index)):
            writer.writerow([int(traj.index[i]),
                             repr(float(traj.goal_raw[i])),
                             repr(float(traj.goal[i])),
                             repr(float(traj.phi[i])),
                             repr(float(traj.reward[i])),
                             int(traj.dropped[i])]
                            + [repr(float(a)) for a in traj.actions[i]])


def read_trajectory(path) -> TrajectoryFile:
    dt = None
    k = None
    source: dict = {}
    rows = []
    header = None
    with open(path) as fh:
        first = fh.readline().strip()
        if not first.startswith(f"# {MAGIC}"):
            raise TrajectoryFileError(f"{path} is not a trajectory file")
        for line in fh:
            line = line.strip()
            if not line:
                continue
            if line.startswith("#"):
                body = line[1:].strip()
                if body.startswith("source"):
                    for pair in body[len("source"):].split():
                        key, _, val = pair.partition("=")
                        source[key] = _parse_scalar(val)
                else:
                    for pair in body.split():
                        key, _, val = pair.partition("=")
                        if key == "dt":
                            dt = float(val)
                        elif key == "K":
                            k = int(val)
                continue
            cells = next(csv.reader([line]))
            if header is None:
                header = cells
                continue
            rows.append(cells)
    if dt is None or k is None or header is None:
        raise TrajectoryFileError(f"{path}: missing header metadata")
    m = len(header) - 6
    if m != 2 * k:
        raise TrajectoryFileError(
            f"{path}: {m} action columns inconsistent with K={k}")
    try:
        data = np.array([[float(c) for c in row] for row in rows])
    except ValueError as exc:
        raise TrajectoryFileError(f"{path}: malformed row: {exc}") from exc
    if data.ndim != 2 or data.shape[1] != len(header):
        raise TrajectoryFileError(f"{path}: ragged or empty data section")
    return TrajectoryFile(dt=dt, num_fingers=k, source=source,
                          index=data[:, 0].astype(int),
                          goal_raw=data[:, 1], goal=data[:, 2],
                          phi=data[:, 3], reward=data[:, 4],
                          dropped=data[:, 5].astype(bool),
                          actions=data[:, 6:])


def _parse_scalar(text: str):
    text = text.strip("'\"")
    for cast in (int, float):
        try:
            return cast(text)
        except ValueError:
            continue
    return text
