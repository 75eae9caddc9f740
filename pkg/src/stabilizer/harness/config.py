"""Experiment configuration: YAML schema, defaults and validation.

Example file (all keys optional, these are the defaults)::

    n: 4
    shots: 8192
    runs: 10
    seed: 2022
    arms: [unmitigated, static, adaptive]
    drift:
      e0: {mean: [0.9, 0.8, 0.85, 0.75], std_fraction: 0.1}
      e1: {mean: [0.85, 0.75, 0.80, 0.70], std_fraction: 0.1}
      e2: {mean: [3.1, 4.1, 4.9, 2.9], unit: degrees, std_fraction: 0.1}
    inference:
      prior: uniform            # uniform | configured | sequential
      chain_steps: 10000
      burn_in_fraction: 0.2
      proposal_scales: [0.02, 0.02, 0.01]
    output:
      dir: results

Each drift parameter takes ``mean`` (a scalar broadcast to all qubits or a
list of length ``n``) and either ``std`` (same shapes) or ``std_fraction``.
A zero standard deviation pins the parameter to its mean on every run.
``e2`` also takes ``unit: degrees | radians`` (default degrees).
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field, replace
from pathlib import Path
from typing import Optional

import numpy as np
import yaml

from ..exceptions import ConfigError, InvalidDriftSpecError
from ..inference import PRIOR_MODES, ChainConfig
from ..noise import DriftModel
from ..simulator import MAX_QUBITS

ARMS = ("unmitigated", "static", "adaptive")

PAPER_DRIFT = {
    "e0": {"mean": [0.9, 0.8, 0.85, 0.75], "std_fraction": 0.1},
    "e1": {"mean": [0.85, 0.75, 0.80, 0.70], "std_fraction": 0.1},
    "e2": {"mean": [3.1, 4.1, 4.9, 2.9], "unit": "degrees", "std_fraction": 0.1},
}

_TOP_KEYS = {"n", "shots", "runs", "seed", "arms", "drift", "inference", "output"}
_DRIFT_KEYS = {"mean", "std", "std_fraction", "unit"}
_INFERENCE_KEYS = {"prior", "chain_steps", "burn_in_fraction", "proposal_scales"}


@dataclass(frozen=True)
class ExperimentConfig:
    n: int = 4
    shots: int = 8192
    runs: int = 10
    drift_means: np.ndarray = field(default=None, compare=False)
    drift_stds: np.ndarray = field(default=None, compare=False)
    chain_steps: int = 10_000
    burn_in_fraction: float = 0.2
    proposal_scales: tuple = (0.02, 0.02, 0.01)
    prior: str = "uniform"
    arms: tuple = ARMS
    seed: int = 2022
    out_dir: Optional[str] = None

    def __post_init__(self):
        if self.drift_means is None or self.drift_stds is None:
            means, stds = _parse_drift(PAPER_DRIFT, self.n)
            object.__setattr__(self, "drift_means", means)
            object.__setattr__(self, "drift_stds", stds)
        _validate(self)

    @property
    def drift(self) -> DriftModel:
        return DriftModel.from_mean_std(self.drift_means, self.drift_stds)

    @property
    def chain(self) -> ChainConfig:
        return ChainConfig(self.chain_steps, self.burn_in_fraction, self.proposal_scales)

    def with_overrides(self, **kwargs) -> "ExperimentConfig":
        """Copy with the non-None keyword arguments applied."""
        return replace(self, **{k: v for k, v in kwargs.items() if v is not None})

    def to_dict(self) -> dict:
        return {
            "n": self.n,
            "shots": self.shots,
            "runs": self.runs,
            "seed": self.seed,
            "arms": list(self.arms),
            "drift": {
                name: {
                    "mean": self.drift_means[:, k].tolist(),
                    "std": self.drift_stds[:, k].tolist(),
                    **({"unit": "radians"} if name == "e2" else {}),
                }
                for k, name in enumerate(("e0", "e1", "e2"))
            },
            "inference": {
                "prior": self.prior,
                "chain_steps": self.chain_steps,
                "burn_in_fraction": self.burn_in_fraction,
                "proposal_scales": list(self.proposal_scales),
            },
            "output": {"dir": self.out_dir},
        }


def _validate(cfg):
    if not isinstance(cfg.n, int) or not 1 <= cfg.n <= MAX_QUBITS:
        raise ConfigError(f"n must be an integer in [1, {MAX_QUBITS}], got {cfg.n!r}")
    if not isinstance(cfg.shots, int) or cfg.shots < 1:
        raise ConfigError(f"shots must be a positive integer, got {cfg.shots!r}")
    if not isinstance(cfg.runs, int) or cfg.runs < 1:
        raise ConfigError(f"runs must be a positive integer, got {cfg.runs!r}")
    if not isinstance(cfg.seed, int) or cfg.seed < 0:
        raise ConfigError(f"seed must be a nonnegative integer, got {cfg.seed!r}")
    if cfg.prior not in PRIOR_MODES:
        raise ConfigError(f"prior must be one of {PRIOR_MODES}, got {cfg.prior!r}")
    arms = tuple(cfg.arms)
    bad = [a for a in arms if a not in ARMS]
    if bad or not arms or len(set(arms)) != len(arms):
        raise ConfigError(f"arms must be distinct members of {ARMS}, got {list(arms)}")
    object.__setattr__(cfg, "arms", tuple(a for a in ARMS if a in arms))
    if cfg.drift_means.shape != (cfg.n, 3) or cfg.drift_stds.shape != (cfg.n, 3):
        raise ConfigError(f"drift specification must cover {cfg.n} qubits")
    try:
        cfg.chain
    except ValueError as exc:
        raise ConfigError(f"inference: {exc}") from exc
    try:
        cfg.drift
    except InvalidDriftSpecError as exc:
        raise ConfigError(f"drift: {exc}") from exc


def _per_qubit(value, n, what):
    arr = np.atleast_1d(np.asarray(value, dtype=float))
    if arr.ndim != 1:
        raise ConfigError(f"{what} must be a number or a list")
    if arr.size == 1:
        arr = np.repeat(arr, n)
    if arr.size != n:
        raise ConfigError(f"{what} has {arr.size} entries, expected {n}")
    return arr


def _parse_drift(drift, n):
    if not isinstance(drift, dict):
        raise ConfigError("drift must be a mapping")
    unknown = set(drift) - {"e0", "e1", "e2"}
    if unknown:
        raise ConfigError(f"unknown drift parameters: {sorted(unknown)}")
    means = np.zeros((n, 3))
    stds = np.zeros((n, 3))
    for k, name in enumerate(("e0", "e1", "e2")):
        spec = drift.get(name, PAPER_DRIFT[name])
        if not isinstance(spec, dict) or "mean" not in spec:
            raise ConfigError(f"drift.{name} needs a 'mean'")
        extra = set(spec) - _DRIFT_KEYS
        if extra:
            raise ConfigError(f"drift.{name}: unknown keys {sorted(extra)}")
        if "std" in spec and "std_fraction" in spec:
            raise ConfigError(f"drift.{name}: give either std or std_fraction, not both")
        try:
            mean = _per_qubit(spec["mean"], n, f"drift.{name}.mean")
            if "std" in spec:
                std = _per_qubit(spec["std"], n, f"drift.{name}.std")
            else:
                std = mean * float(spec.get("std_fraction", 0.1))
        except (TypeError, ValueError) as exc:
            raise ConfigError(f"drift.{name}: {exc}") from exc
        unit = spec.get("unit", "degrees" if name == "e2" else None)
        if name == "e2":
            if unit not in ("degrees", "radians"):
                raise ConfigError(f"drift.e2.unit must be degrees or radians, got {unit!r}")
            if unit == "degrees":
                mean, std = mean * math.pi / 180.0, std * math.pi / 180.0
        elif unit is not None:
            raise ConfigError(f"drift.{name} takes no unit")
        if np.any(std < 0):
            raise ConfigError(f"drift.{name}: negative standard deviation")
        means[:, k] = mean
        stds[:, k] = std
    return means, stds


def config_from_dict(data: dict) -> ExperimentConfig:
    if data is None:
        data = {}
    if not isinstance(data, dict):
        raise ConfigError("configuration must be a mapping")
    unknown = set(data) - _TOP_KEYS
    if unknown:
        raise ConfigError(f"unknown configuration keys: {sorted(unknown)}")
    kwargs = {}
    for key in ("n", "shots", "runs", "seed"):
        if key in data:
            kwargs[key] = data[key]
    n = kwargs.get("n", 4)
    if not isinstance(n, int) or not 1 <= n <= MAX_QUBITS:
        raise ConfigError(f"n must be an integer in [1, {MAX_QUBITS}], got {n!r}")
    if "arms" in data:
        arms = data["arms"]
        kwargs["arms"] = tuple(arms.split(",") if isinstance(arms, str) else arms)
    drift = data.get("drift", {} if n == 4 else None)
    if drift is None:
        raise ConfigError("a drift section is required when n != 4")
    kwargs["drift_means"], kwargs["drift_stds"] = _parse_drift(drift, n)
    inf = data.get("inference", {}) or {}
    if not isinstance(inf, dict) or set(inf) - _INFERENCE_KEYS:
        raise ConfigError(f"inference accepts only {sorted(_INFERENCE_KEYS)}")
    if "prior" in inf:
        kwargs["prior"] = inf["prior"]
    if "chain_steps" in inf:
        kwargs["chain_steps"] = inf["chain_steps"]
    if "burn_in_fraction" in inf:
        kwargs["burn_in_fraction"] = float(inf["burn_in_fraction"])
    if "proposal_scales" in inf:
        kwargs["proposal_scales"] = tuple(float(s) for s in inf["proposal_scales"])
    out = data.get("output", {}) or {}
    if out.get("dir") is not None:
        kwargs["out_dir"] = str(out["dir"])
    if not isinstance(kwargs.get("chain_steps", 1), int):
        raise ConfigError("inference.chain_steps must be an integer")
    return ExperimentConfig(**kwargs)


def load_config(path) -> ExperimentConfig:
    path = Path(path)
    try:
        text = path.read_text()
    except OSError as exc:
        raise ConfigError(f"cannot read {path}: {exc}") from exc
    try:
        data = yaml.safe_load(text)
    except yaml.YAMLError as exc:
        raise ConfigError(f"{path} is not valid YAML: {exc}") from exc
    return config_from_dict(data)
