"""Experiment configuration: one JSON document holding deployment and run settings."""
from __future__ import annotations

import json
from dataclasses import dataclass, field, fields
from importlib import resources
from pathlib import Path

from .learner import POLICIES
from .model import Deployment


class ConfigError(ValueError):
    pass


@dataclass
class ExperimentConfig:
    deployment: Deployment
    policies: list[str] = field(default_factory=lambda: list(POLICIES))
    iterations: int = 110
    cycles: int | None = None
    seeds: list[int] = field(default_factory=lambda: [0])
    output_dir: str = "out"
    workers: int = 1
    epsilon0: float = 1.0
    payoff_mode: str = "ema"
    association_cost: bool | None = None
    verbose_cycles: bool = False
    plots: bool = True
    calibration: dict | None = None
    source: str | None = None

    def __post_init__(self):
        if self.iterations < 1:
            raise ConfigError("iterations must be >= 1")
        if self.cycles is not None and self.cycles < 1:
            raise ConfigError("cycles must be >= 1")
        if not self.seeds:
            raise ConfigError("at least one seed is required")
        if self.workers < 1:
            raise ConfigError("workers must be >= 1")
        bad = [p for p in self.policies if p not in POLICIES]
        if bad or not self.policies:
            raise ConfigError(f"policies must be drawn from {POLICIES}, got {self.policies}")
        if self.payoff_mode not in ("ema", "freeze"):
            raise ConfigError(f"payoff_mode must be 'ema' or 'freeze', got {self.payoff_mode!r}")

    @property
    def K(self) -> int:
        return self.deployment.averaging_cycles if self.cycles is None else self.cycles

    @classmethod
    def from_dict(cls, data: dict, source: str | None = None) -> ExperimentConfig:
        if "deployment" not in data:
            raise ConfigError("config has no 'deployment' section")
        exp = dict(data.get("experiment", {}))
        known = {f.name for f in fields(cls)} - {"deployment", "calibration", "source"}
        unknown = set(exp) - known
        if unknown:
            raise ConfigError(f"unknown experiment keys: {sorted(unknown)}")
        return cls(
            deployment=Deployment.from_dict(data["deployment"]),
            calibration=data.get("calibration"),
            source=source,
            **exp,
        )


def load_config(path: str | Path) -> ExperimentConfig:
    path = Path(path)
    try:
        data = json.loads(path.read_text())
    except OSError as exc:
        raise ConfigError(f"cannot read config {path}: {exc.strerror}") from exc
    except json.JSONDecodeError as exc:
        raise ConfigError(f"config {path} is not valid JSON: {exc}") from exc
    return ExperimentConfig.from_dict(data, source=str(path))


def office_config_text() -> str:
    """Packaged nine-station office deployment calibrated to the testbed RSSI."""
    return resources.files("emhroute").joinpath("data/office9.json").read_text()


def office_config() -> ExperimentConfig:
    return ExperimentConfig.from_dict(json.loads(office_config_text()), source="office9.json")
