"""Figure rendering for training runs, tracking traces and step responses.

All functions write a PNG next to whatever tabular output the caller
produced and return the path. Rendering uses the Agg backend so the CLI
works headless.
"""

from __future__ import annotations

from pathlib import Path

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt  # noqa: E402
import numpy as np  # noqa: E402

from .metrics import TrajectoryRecord  # noqa: E402


def plot_training_curves(success_logs: list[list[float]], path: str | Path,
                         labels: list[str] | None = None) -> Path:
    """Per-epoch evaluation success for one or more runs, plus the mean."""
    path = Path(path)
    fig, ax = plt.subplots(figsize=(7, 4))
    for i, log in enumerate(success_logs):
        label = labels[i] if labels else f"run {i}"
        ax.plot(log, alpha=0.6 if len(success_logs) > 1 else 1.0, label=label)
    if len(success_logs) > 1:
        shortest = min(len(log) for log in success_logs)
        mean = np.mean([log[:shortest] for log in success_logs], axis=0)
        ax.plot(mean, color="black", linewidth=2, label="mean")
    ax.set_xlabel("epoch")
    ax.set_ylabel("evaluation success rate")
    ax.set_ylim(-0.02, 1.02)
    ax.grid(alpha=0.3)
    ax.legend(loc="lower right", fontsize="small")
    fig.tight_layout()
    fig.savefig(path, dpi=120)
    plt.close(fig)
    return path


def plot_tracking(record: TrajectoryRecord, path: str | Path,
                  title: str = "") -> Path:
    """Goal vs. achieved yaw over time, with the action envelope below."""
    path = Path(path)
    t = np.arange(len(record.phi)) * record.dt
    fig, (ax1, ax2) = plt.subplots(2, 1, figsize=(7, 5), sharex=True,
                                   height_ratios=[2, 1])
    ax1.plot(t, record.goal, label="goal", color="tab:orange")
    ax1.plot(t, record.phi, label="object yaw", color="tab:blue")
    ax1.set_ylabel("yaw (rad)")
    ax1.grid(alpha=0.3)
    ax1.legend(loc="best", fontsize="small")
    if title:
        ax1.set_title(title)
    ax2.plot(t, np.max(np.abs(record.actions), axis=1), color="tab:gray",
             label="max |action|")
    ax2.set_ylim(0, 1.05)
    ax2.set_xlabel("time (s)")
    ax2.set_ylabel("|a|")
    ax2.grid(alpha=0.3)
    ax2.legend(loc="best", fontsize="small")
    fig.tight_layout()
    fig.savefig(path, dpi=120)
    plt.close(fig)
    return path


def plot_step_response(record: TrajectoryRecord, path: str | Path,
                       onset: int = 50, magnitude: float = 1.0,
                       band: float = 0.05) -> Path:
    """Step response with the settling band drawn around the target."""
    path = Path(path)
    t = np.arange(len(record.phi)) * record.dt
    fig, ax = plt.subplots(figsize=(7, 4))
    ax.plot(t, record.goal, color="tab:orange", label="goal")
    ax.plot(t, record.phi, color="tab:blue", label="object yaw")
    ax.axhspan(magnitude - band, magnitude + band, color="tab:green",
               alpha=0.15, label=f"±{band} rad band")
    ax.axvline(onset * record.dt, color="gray", linestyle=":", linewidth=1)
    ax.set_xlabel("time (s)")
    ax.set_ylabel("yaw (rad)")
    ax.grid(alpha=0.3)
    ax.legend(loc="lower right", fontsize="small")
    fig.tight_layout()
    fig.savefig(path, dpi=120)
    plt.close(fig)
    return path
