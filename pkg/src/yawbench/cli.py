"""Command-line interface.

Subcommands: train (policy learning runs), eval (scripted-goal tracking
of a checkpoint plus the metric report), serve (websocket teleop
service), metrics (recompute reports from trajectory files) and replay
(re-run a recorded goal sequence through a checkpoint headlessly).

Exit codes: 0 success, 1 usage error, 2 configuration error, 3 runtime
failure.
"""

from __future__ import annotations

import dataclasses
import json
import sys
from pathlib import Path

import click
import numpy as np

from .config import ConfigError, load_config
from .core import Goal
from .goals import SINE_GRID, SensorModel, sinusoid_goal, step_goal
from .metrics import (StepReport, emit_report, mse, saturation, sine_report,
                      step_metrics)
from .plots import plot_step_response, plot_tracking, plot_training_curves
from .reward import RewardConfig
from .rl import load_checkpoint, rollout_episode, save_checkpoint, train
from .rl.checkpoint import CheckpointError
from .teleop import SessionError, replay_goals
from .trajfile import (TrajectoryFile, TrajectoryFileError, read_trajectory,
                       write_trajectory)


@click.group()
@click.option("--config", "config_path", type=click.Path(exists=True),
              default=None, help="YAML workbench configuration file.")
@click.pass_context
def cli(ctx, config_path):
    """End-effect yaw-tracking workbench."""
    ctx.obj = load_config(config_path)


# -- train -------------------------------------------------------------------

@cli.command("train")
@click.option("--runs", default=1, show_default=True,
              help="Repeat training with seeds seed, seed+1, ...")
@click.option("--epochs", default=None, type=int,
              help="Override the configured epoch count.")
@click.option("--reward", default=None,
              type=click.Choice(["sparse", "dense"]),
              help="Override the configured reward kind.")
@click.option("--seed", default=0, show_default=True)
@click.option("--out", "out_dir", default="runs/train",
              show_default=True, type=click.Path())
@click.pass_obj
def cmd_train(cfg, runs, epochs, reward, seed, out_dir):
    """Train policies and write checkpoints plus success-rate logs."""
    train_cfg = cfg.training
    if epochs is not None:
        train_cfg = dataclasses.replace(train_cfg, epochs=epochs)
    reward_cfg = cfg.reward
    if reward is not None:
        reward_cfg = (RewardConfig.sparse() if reward == "sparse"
                      else RewardConfig.dense())
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    logs = []
    for run in range(runs):
        run_seed = seed + run
        def progress(epoch, rate, _seed=run_seed):
            click.echo(f"[seed {_seed}] epoch {epoch}: success {rate:.2f}")
        ckpt, log = train(cfg.plant, reward_cfg, train_cfg, seed=run_seed,
                          progress=progress)
        save_checkpoint(ckpt, out / f"policy_seed{run_seed}.ckpt")
        with open(out / f"success_seed{run_seed}.csv", "w") as fh:
            fh.write("epoch,rate\n")
            for epoch, rate in enumerate(log):
                fh.write(f"{epoch},{rate!r}\n")
        logs.append(log)
    manifest = {
        "reward": reward_cfg.kind, "epochs": train_cfg.epochs,
        "runs": runs, "base_seed": seed,
        "final_rates": [log[-1] if log else None for log in logs],
    }
    with open(out / "manifest.json", "w") as fh:
        json.dump(manifest, fh, indent=2)
    if any(logs):
        plot_training_curves(logs, out / "training_curve.png",
                             labels=[f"seed {seed + r}" for r in range(runs)])
    click.echo(f"wrote {runs} run(s) to {out}")


# -- eval --------------------------------------------------------------------

def _track(ckpt, schedule, steps, seed, rep):
    plant_cfg = dataclasses.replace(ckpt.plant_config, horizon=steps)
    agent = ckpt.build_agent()
    rng = np.random.default_rng(seed + rep)
    _, log, _ = rollout_episode(plant_cfg, ckpt.reward_config,
                                lambda o, s, g: agent.act(o),
                                Goal(0.0), rng, initial_yaw_range=(0.0, 0.0),
                                goal_schedule=schedule)
    return log


@cli.command("eval")
@click.argument("checkpoint", type=click.Path(exists=True))
@click.option("--goal", "goal_kind", default="sine", show_default=True,
              type=click.Choice(["sine", "step", "grid"]))
@click.option("--alpha", default=0.5, show_default=True)
@click.option("--omega", default=0.05, show_default=True,
              help="Sinusoid frequency in rad/step.")
@click.option("--repeats", default=1, show_default=True)
@click.option("--steps", default=500, show_default=True,
              help="Episode length for tracking runs.")
@click.option("--seed", default=0, show_default=True)
@click.option("--fmt", default="csv", type=click.Choice(["csv", "table"]),
              show_default=True)
@click.option("--out", "out_dir", default="runs/eval", show_default=True,
              type=click.Path())
@click.pass_obj
def cmd_eval(cfg, checkpoint, goal_kind, alpha, omega, repeats, steps, seed,
             fmt, out_dir):
    """Track scripted goals with a checkpoint and emit the metric report."""
    ckpt = load_checkpoint(checkpoint)
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    k = ckpt.plant_config.K

    if goal_kind in ("sine", "grid"):
        grid = SINE_GRID if goal_kind == "grid" else [(alpha, omega)]
        reports = []
        for a, w in grid:
            for rep in range(repeats):
                log = _track(ckpt, lambda i: sinusoid_goal(a, w, i),
                             steps, seed, rep)
                traj = TrajectoryFile.from_log(
                    log, k, {"kind": "sine", "alpha": a, "omega": w,
                             "seed": seed + rep})
                path = out / f"sine_a{a}_w{w}_rep{rep}.csv"
                write_trajectory(traj, path)
                reports.append(sine_report(traj.record(), a, w))
                if rep == 0:
                    plot_tracking(traj.record(),
                                  out / f"sine_a{a}_w{w}.png",
                                  title=f"alpha={a} omega={w}")
        report_path = out / f"report_sine.{fmt}"
        emit_report(reports, report_path, fmt)
        for r in reports:
            click.echo(f"alpha={r.alpha} omega={r.omega} "
                       f"MSE={r.mse:.4g} L={r.latency:.2f} "
                       f"Sat={r.saturation:.1f}% E={r.energy:.1f}")
    else:
        onset, magnitude = 50, 1.0
        reports = []
        for rep in range(repeats):
            log = _track(ckpt, lambda i: step_goal(i, magnitude, onset),
                         steps, seed, rep)
            traj = TrajectoryFile.from_log(
                log, k, {"kind": "step", "magnitude": magnitude,
                         "onset": onset, "seed": seed + rep})
            path = out / f"step_rep{rep}.csv"
            write_trajectory(traj, path)
            reports.append(step_metrics(traj.record(), magnitude, onset))
            if rep == 0:
                plot_step_response(traj.record(), out / "step.png",
                                   onset=onset, magnitude=magnitude)
        report_path = out / f"report_step.{fmt}"
        emit_report(reports, report_path, fmt)
        for r in reports:
            tst = f"{r.settling_time:.0f}" if r.settled else "unsettled"
            click.echo(f"t_p={r.peak_time:.0f} t_st={tst} "
                       f"OS={r.overshoot:.1f}% e_ss={r.steady_state_error:.1f}%")
    click.echo(f"report: {report_path}")


# -- serve -------------------------------------------------------------------

@cli.command("serve")
@click.argument("checkpoint", type=click.Path(exists=True))
@click.option("--host", default=None, help="Override configured bind host.")
@click.option("--port", default=None, type=int,
              help="Override configured bind port.")
@click.pass_obj
def cmd_serve(cfg, checkpoint, host, port):
    """Host the teleoperation websocket service until interrupted."""
    import uvicorn

    from .server import create_app

    app = create_app(cfg, checkpoint)
    host = host or cfg.service.host
    port = port if port is not None else cfg.service.port
    click.echo(f"serving ws://{host}:{port}/ws")
    uvicorn.run(app, host=host, port=port, log_level="warning")


# -- metrics -----------------------------------------------------------------

@cli.command("metrics")
@click.argument("paths", nargs=-1, required=True,
                type=click.Path(exists=True))
@click.option("--fmt", default="table", type=click.Choice(["csv", "table"]),
              show_default=True)
@click.option("--out", "out_path", default=None, type=click.Path(),
              help="Report file; defaults next to the first input.")
@click.pass_obj
def cmd_metrics(cfg, paths, fmt, out_path):
    """Recompute the metric suite from trajectory files."""
    files = []
    for p in paths:
        p = Path(p)
        if p.is_dir():
            files.extend((f, True) for f in sorted(p.glob("*.csv")))
        else:
            files.append((p, False))
    reports = []
    kind = None
    for p, from_glob in files:
        try:
            traj = read_trajectory(p)
        except TrajectoryFileError:
            if from_glob:
                continue   # directories may hold report files too
            raise
        rec = traj.record()
        src = traj.source.get("kind")
        if src == "step":
            kind = kind or "step"
            r = step_metrics(rec, float(traj.source.get("magnitude", 1.0)),
                             int(traj.source.get("onset", 50)))
        else:
            kind = kind or "sine"
            alpha = float(traj.source.get("alpha", 0.0))
            omega = float(traj.source.get("omega", 0.0))
            try:
                r = sine_report(rec, alpha, omega)
            except ValueError as exc:
                click.echo(f"{p}: {exc} -- reporting MSE/Sat only")
                click.echo(f"{p}: MSE={mse(rec):.6g} "
                           f"Sat={saturation(rec):.1f}%")
                continue
        reports.append(r)
        click.echo(f"{p}: " + " ".join(
            f"{h}={v:.6g}" if isinstance(v, float) else f"{h}={v}"
            for h, v in zip(type(r).HEADER, r.row())))
    if reports:
        out = Path(out_path) if out_path else files[0][0].with_name(
            f"metrics_report.{fmt}")
        emit_report(reports, out, fmt)
        click.echo(f"report: {out}")


# -- replay ------------------------------------------------------------------

@cli.command("replay")
@click.argument("checkpoint", type=click.Path(exists=True))
@click.argument("goal_file", type=click.Path(exists=True))
@click.option("--sensor", default="ideal", show_default=True,
              type=click.Choice(["ideal", "imu", "camera"]))
@click.option("--seed", default=0, show_default=True)
@click.option("--out", "out_path", default=None, type=click.Path(),
              help="Output trajectory; defaults to <goal_file>.replay.csv")
@click.pass_obj
def cmd_replay(cfg, checkpoint, goal_file, sensor, seed, out_path):
    """Re-run a recorded goal sequence through a checkpoint headlessly."""
    ckpt = load_checkpoint(checkpoint)
    source = read_trajectory(goal_file)
    log, session = replay_goals(ckpt, source.goal_raw,
                                SensorModel(kind=sensor), seed=seed,
                                pong_config=cfg.pong)
    out = Path(out_path) if out_path else Path(goal_file).with_suffix(
        ".replay.csv")
    traj = TrajectoryFile.from_log(log, ckpt.plant_config.K,
                                   {"kind": "replay", "sensor": sensor,
                                    "seed": seed, "goals": str(goal_file)})
    write_trajectory(traj, out)
    summary = session.summary()
    click.echo(f"replayed {len(log)} steps: MSE={summary['mse']:.6g} "
               f"Sat={summary['sat']:.1f}% drop={summary['drop']}")
    click.echo(f"trajectory: {out}")


def main():
    try:
        cli.main(standalone_mode=False)
    except click.Abort:
        sys.exit(1)
    except click.UsageError as exc:
        exc.show()
        sys.exit(1)
    except click.ClickException as exc:
        exc.show()
        sys.exit(1)
    except ConfigError as exc:
        click.echo(f"configuration error: {exc}", err=True)
        sys.exit(2)
    except (CheckpointError, TrajectoryFileError, SessionError,
            OSError) as exc:
        click.echo(f"error: {exc}", err=True)
        sys.exit(3)


if __name__ == "__main__":
    main()
