"""Workbench configuration file handling.

A single YAML file with plant / reward / training / sensor / pong /
service / logging sections, each mapping onto the corresponding config
dataclass. Unknown sections or keys are rejected; every default comes
from the dataclasses themselves. The `EFOLD_LOG_DIR` environment
variable overrides the logging root.
"""

from __future__ import annotations

import os
from dataclasses import asdict, dataclass, field, fields
from pathlib import Path

import yaml

from .plant import PlantConfig
from .reward import RewardConfig
from .rl.agent import TrainConfig
from .goals import SensorModel
from .teleop import PongConfig

LOG_DIR_ENV = "EFOLD_LOG_DIR"


class ConfigError(ValueError):
    pass


@dataclass(frozen=True)
class ServiceConfig:
    host: str = "127.0.0.1"
    port: int = 8765


@dataclass
class WorkbenchConfig:
    plant: PlantConfig = field(default_factory=PlantConfig)
    reward: RewardConfig = field(default_factory=RewardConfig)
    training: TrainConfig = field(default_factory=TrainConfig)
    sensor: SensorModel = field(default_factory=SensorModel)
    pong: PongConfig = field(default_factory=PongConfig)
    service: ServiceConfig = field(default_factory=ServiceConfig)
    log_dir: Path = field(default_factory=lambda: Path("runs"))

    def resolve_log_dir(self) -> Path:
        env = os.environ.get(LOG_DIR_ENV)
        return Path(env) if env else self.log_dir


_SECTIONS = {
    "plant": PlantConfig,
    "reward": RewardConfig,
    "training": TrainConfig,
    "sensor": SensorModel,
    "pong": PongConfig,
    "service": ServiceConfig,
}


def _build(cls, section: str, data: dict):
    if not isinstance(data, dict):
        raise ConfigError(f"section {section!r} must be a mapping")
    known = {f.name for f in fields(cls)}
    unknown = set(data) - known
    if unknown:
        raise ConfigError(
            f"unknown keys in section {section!r}: {sorted(unknown)}")
    try:
        return cls(**data)
    except (TypeError, ValueError) as exc:
        raise ConfigError(f"invalid section {section!r}: {exc}") from exc


def load_config(path: str | Path | None = None) -> WorkbenchConfig:
    if path is None:
        return WorkbenchConfig()
    try:
        with open(path) as fh:
            doc = yaml.safe_load(fh) or {}
    except OSError as exc:
        raise ConfigError(f"cannot read config {path}: {exc}") from exc
    except yaml.YAMLError as exc:
        raise ConfigError(f"malformed config {path}: {exc}") from exc
    if not isinstance(doc, dict):
        raise ConfigError(f"config {path} must be a mapping of sections")
    unknown = set(doc) - set(_SECTIONS) - {"logging"}
    if unknown:
        raise ConfigError(f"unknown config sections: {sorted(unknown)}")
    cfg = WorkbenchConfig()
    for name, cls in _SECTIONS.items():
        if name in doc:
            setattr(cfg, name, _build(cls, name, doc[name]))
    logging = doc.get("logging", {})
    if logging:
        if not isinstance(logging, dict) or set(logging) - {"dir"}:
            raise ConfigError("logging section accepts only the key 'dir'")
        cfg.log_dir = Path(logging["dir"])
    return cfg


def dump_config(cfg: WorkbenchConfig, path: str | Path) -> None:
    doc = {name: asdict(getattr(cfg, name)) for name in _SECTIONS}
    doc["logging"] = {"dir": str(cfg.log_dir)}
    with open(path, "w") as fh:
        yaml.safe_dump(doc, fh, sort_keys=True)
