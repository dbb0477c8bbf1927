"""Quantitative tracking metrics over logged trajectories.

Sinusoid tracking: mean square error (wrapped differencing), FFT-phase
latency at the dominant goal frequency, actuator saturation percentage
and total commanded-motion energy. Step tracking: peak time, settling
time, overshoot and steady-state error. Reports can be emitted as
delimited text or a readable table.
"""

from __future__ import annotations

import csv
import math
from dataclasses import dataclass

import numpy as np

from .core import wrap_angle


@dataclass(frozen=True)
class TrajectoryRecord:
    dt: float
    goal: np.ndarray      # radians, length n
    phi: np.ndarray       # radians, length n
    actions: np.ndarray   # (n, m) in [-1, 1]

    def __post_init__(self):
        if len(self.goal) != len(self.phi) or len(self.phi) != len(self.actions):
            raise ValueError("goal, phi and action series must have equal length")

    @property
    def n(self) -> int:
        return len(self.phi)


@dataclass(frozen=True)
class SineReport:
    alpha: float
    omega: float
    mse: float            # rad^2
    latency: float        # steps; negative = actual lags the goal
    saturation: float     # percent
    energy: float         # Σ|a_ij|
    energy_per_step: float

    HEADER = ["alpha", "omega", "MSE(rad^2)", "L(step)", "Sat(%)", "E", "E/step"]

    def row(self):
        return [self.alpha, self.omega, self.mse, self.latency,
                self.saturation, self.energy, self.energy_per_step]


@dataclass(frozen=True)
class StepReport:
    peak_time: float          # steps from onset
    settling_time: float      # steps from onset; nan if unsettled
    overshoot: float          # percent, signed
    steady_state_error: float  # percent, signed
    settled: bool = True

    HEADER = ["t_p(step)", "t_st(step)", "OS(%)", "e_ss(%)"]

    def row(self):
        tst = self.settling_time if self.settled else float("nan")
        return [self.peak_time, tst, self.overshoot, self.steady_state_error]


def _wrapped_error(phi: np.ndarray, goal: np.ndarray) -> np.ndarray:
    return np.array([wrap_angle(p - g) for p, g in zip(phi, goal)])


def mse(record: TrajectoryRecord) -> float:
    """Mean squared wrapped tracking error, rad^2."""
    if record.n == 0:
        raise ValueError("empty trajectory")
    err = _wrapped_error(record.phi, record.goal)
    return float(np.mean(err ** 2))


def latency(record: TrajectoryRecord) -> float:
    """Phase lag of the actual series behind the goal, in steps.

    Both series are Fourier-transformed; the bin with the largest goal
    magnitude (zero bin excluded) defines the dominant frequency, and
    the wrapped phase difference at that bin, divided by the bin
    frequency in rad/step, gives the lag. Negative values mean the
    actual trajectory lags the goal.
    """
    n = record.n
    if n < 64:
        raise ValueError("latency needs at least 64 samples")
    if np.allclose(record.goal, record.goal[0]):
        raise ValueError("latency undefined for a constant goal")
    win = np.hanning(n)
    fg = np.fft.rfft(record.goal * win)
    fa = np.fft.rfft(record.phi * win)
    k = int(np.argmax(np.abs(fg[1:]))) + 1
    omega = 2.0 * math.pi * k / n
    dphase = wrap_angle(float(np.angle(fa[k]) - np.angle(fg[k])))
    return dphase / omega


def saturation(record: TrajectoryRecord, threshold: float = 0.99) -> float:
    """Percentage of actuator commands at (near) maximum magnitude."""
    if record.actions.size == 0:
        raise ValueError("empty action matrix")
    return 100.0 * float(np.mean(np.abs(record.actions) >= threshold))


def energy(record: TrajectoryRecord) -> float:
    """Total commanded motion: the double sum of |a_ij| over all steps
    and joints."""
    if record.actions.size == 0:
        raise ValueError("empty action matrix")
    return float(np.sum(np.abs(record.actions)))


def sine_report(record: TrajectoryRecord, alpha: float, omega: float,
                sat_threshold: float = 0.99) -> SineReport:
    e = energy(record)
    return SineReport(alpha=alpha, omega=omega, mse=mse(record),
                      latency=latency(record),
                      saturation=saturation(record, sat_threshold),
                      energy=e, energy_per_step=e / record.n)


def step_metrics(record: TrajectoryRecord, step_magnitude: float = 1.0,
                 onset: int = 50, band: float = 0.05,
                 window: int = 20) -> StepReport:
    """Classical step-response measures, indices relative to the onset.

    Steady-state error is the signed mean error over the final `window`
    steps as a percentage of the step magnitude. Overshoot is signed:
    negative when the response never reaches the goal. Settling time is
    the first post-onset index after which the response stays inside the
    +-band around the goal, or flagged unsettled.
    """
    if record.n < onset + window:
        raise ValueError(
            f"record of {record.n} steps too short for onset {onset} + window {window}")
    phi = record.phi[onset:]
    sign = 1.0 if step_magnitude >= 0 else -1.0
    err = phi - step_magnitude

    e_ss = float(np.mean(err[-window:])) / abs(step_magnitude) * 100.0

    peak_idx = int(np.argmax(sign * phi))
    phi_p = float(phi[peak_idx])
    overshoot = (phi_p - step_magnitude) / step_magnitude * 100.0

    inside = np.abs(err) <= band * abs(step_magnitude)
    settled = True
    if inside[-1]:
        t_st = len(inside) - 1
        while t_st > 0 and inside[t_st - 1]:
            t_st -= 1
    else:
        settled = False
        t_st = float("nan")
    return StepReport(peak_time=float(peak_idx), settling_time=float(t_st),
                      overshoot=overshoot, steady_state_error=e_ss,
                      settled=settled)


def emit_report(reports: list, path, fmt: str = "csv") -> None:
    """Write sine or step reports as delimited text or an aligned table."""
    if not reports:
        raise ValueError("no reports to emit")
    header = type(reports[0]).HEADER
    rows = [r.row() for r in reports]
    if fmt == "csv":
        with open(path, "w", newline="") as fh:
            writer = csv.writer(fh)
            writer.writerow(header)
            for row in rows:
                writer.writerow([_fmt(v) for v in row])
    elif fmt == "table":
        cells = [header] + [[_fmt(v) for v in row] for row in rows]
        widths = [max(len(r[c]) for r in cells) for c in range(len(header))]
        with open(path, "w") as fh:
            for r in cells:
                fh.write("  ".join(v.rjust(w) for v, w in zip(r, widths)) + "\n")
    else:
        raise ValueError(f"unknown report format {fmt!r}")


def _fmt(v) -> str:
    if isinstance(v, float):
        return f"{v:.6g}"
    return str(v)
