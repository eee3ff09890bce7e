"""Experiment configuration: a YAML file validated into :class:`ExperimentConfig`.

Top-level keys are ``task``, ``seed``, ``trials`` and ``out``; everything else
is task-specific and kept in ``params``. See ``configs/`` for one example per
task.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from pathlib import Path

import yaml

from .errors import ConfigInvalid

TASKS = ("solve-prony", "solve-confluent", "solve-md", "shifts-moments",
         "shifts-fourier", "pwc", "stability-sweep")

# task -> keys it requires in params
REQUIRED = {
    "solve-prony": (),
    "solve-confluent": (),
    "solve-md": ("model",),
    "shifts-moments": ("model", "kernel"),
    "shifts-fourier": ("model", "kernel"),
    "pwc": ("signal",),
    "stability-sweep": ("model", "eps_grid"),
}


@dataclass
class ExperimentConfig:
    task: str
    params: dict = field(default_factory=dict)
    seed: int | None = None
    trials: int = 1
    out: str = "results"

    def validate(self):
        if self.task not in TASKS:
            raise ConfigInvalid(f"unknown task {self.task!r}; expected one of {TASKS}")
        for key in REQUIRED[self.task]:
            if key not in self.params:
                raise ConfigInvalid(f"task {self.task} requires '{key}'")
        if self.task in ("solve-prony", "solve-confluent") and \
                "model" not in self.params and "moments_file" not in self.params:
            raise ConfigInvalid(f"task {self.task} needs 'model' or 'moments_file'")
        if not isinstance(self.trials, int) or self.trials < 1:
            raise ConfigInvalid("trials must be a positive integer")
        noisy = any(float(e) > 0 for e in self._noise_levels())
        if (self.trials > 1 or noisy or self.task == "stability-sweep") and self.seed is None:
            raise ConfigInvalid("a seed is required for noisy or repeated experiments")
        if self.seed is not None and (not isinstance(self.seed, int) or self.seed < 0):
            raise ConfigInvalid("seed must be a nonnegative integer")
        for e in self._noise_levels():
            if float(e) < 0:
                raise ConfigInvalid("noise levels must be nonnegative")
        for key in ("N", "moments", "jump_count"):
            if key in self.params and (not isinstance(self.params[key], int)
                                       or self.params[key] < 0):
                raise ConfigInvalid(f"'{key}' must be a nonnegative integer")
        return self

    def _noise_levels(self):
        levels = list(self.params.get("eps_grid", []))
        if "noise_eps" in self.params:
            levels.append(self.params["noise_eps"])
        sweep = self.params.get("amplitude_sweep")
        if isinstance(sweep, dict) and "eps" in sweep:
            levels.append(sweep["eps"])
        return levels

    def echo(self) -> dict:
        return {"task": self.task, "seed": self.seed, "trials": self.trials,
                "params": self.params}


def load_config(path, overrides: dict | None = None,
                default_task: str | None = None) -> ExperimentConfig:
    """Read a YAML config; ``overrides`` (e.g. from CLI flags) win over the file."""
    try:
        raw = yaml.safe_load(Path(path).read_text())
    except (OSError, yaml.YAMLError) as exc:
        raise ConfigInvalid(f"cannot read config {path}: {exc}") from exc
    if not isinstance(raw, dict):
        raise ConfigInvalid("config must be a mapping")
    raw = dict(raw)
    for key, value in (overrides or {}).items():
        if value is not None:
            raw[key] = value
    task = raw.pop("task", default_task)
    seed = raw.pop("seed", None)
    trials = raw.pop("trials", 1)
    out = raw.pop("out", "results")
    return ExperimentConfig(task=task, params=raw, seed=seed, trials=trials,
                            out=str(out)).validate()
