"""Run configuration shared by the command-line tools.

Values are layered: built-in defaults, then a config file, then command-line
flags. A config file is either JSON (a flat object, or any emitted artifact
with a ``"config"`` member) or ``key = value`` lines with ``#`` comments.
"""

from __future__ import annotations

import dataclasses
import json
from dataclasses import dataclass, field
from pathlib import Path
from typing import Optional, Union

from .agent import AgentConfig, START_MODES
from .baselines import METHODS
from .svm import SvmConfig


class ConfigError(ValueError):
    pass


@dataclass(frozen=True)
class RunConfig:
    data: Optional[str] = None
    label_column: str = "last"
    alpha: float = 0.1
    gamma: float = 0.9
    epsilon: float = 0.5
    episodes: int = 100
    start_mode: str = "random-subset"
    max_subset_size: Optional[int] = None
    folds: int = 5
    svm_c: float = 1.0
    svm_gamma: Union[float, str] = "auto"
    seed: int = 0
    # sweep-epsilon
    epsilons: tuple[float, ...] = (0.0, 0.25, 0.5, 0.75, 1.0)
    seeds_per_point: int = 20
    # rank
    methods: tuple[str, ...] = METHODS
    k_max: Optional[int] = None
    # synth
    n_samples: int = 200
    n_informative: int = 3
    n_noise: int = 7
    out_dir: str = field(default="out", compare=False)

    def agent_config(self, **overrides) -> AgentConfig:
        kw = dict(alpha=self.alpha, gamma=self.gamma, epsilon=self.epsilon, episodes=self.episodes,
                  start_mode=self.start_mode, max_subset_size=self.max_subset_size, seed=self.seed)
        kw.update(overrides)
        return AgentConfig(**kw)

    def svm_config(self) -> SvmConfig:
        return SvmConfig(c=self.svm_c, kernel_gamma=self.svm_gamma)

    def validate(self) -> "RunConfig":
        try:
            self.agent_config()
            self.svm_config()
        except ValueError as exc:
            raise ConfigError(str(exc)) from None
        if self.folds < 2:
            raise ConfigError(f"folds must be >= 2, got {self.folds}")
        if not self.epsilons:
            raise ConfigError("epsilon list is empty")
        for e in self.epsilons:
            if not 0 <= e <= 1:
                raise ConfigError(f"epsilon {e} outside [0, 1]")
        if self.seeds_per_point < 1:
            raise ConfigError("seeds_per_point must be >= 1")
        unknown = [m for m in self.methods if m not in METHODS]
        if unknown:
            raise ConfigError(f"unknown ranking method(s) {unknown}; choose from {list(METHODS)}")
        if not self.methods:
            raise ConfigError("no ranking methods given")
        if self.k_max is not None and self.k_max < 1:
            raise ConfigError("k_max must be >= 1")
        return self

    def echo(self) -> dict:
        """Resolved settings as embedded in artifacts; the output location is left out."""
        out = dataclasses.asdict(self)
        out.pop("out_dir")
        for k in ("epsilons", "methods"):
            out[k] = list(out[k])
        return out


FIELDS = {f.name: f for f in dataclasses.fields(RunConfig)}


def _coerce(key: str, value):
    if value is None:
        return None
    if key in ("epsilons", "methods"):
        if isinstance(value, str):
            value = [v.strip() for v in value.split(",") if v.strip()]
        return tuple(float(v) for v in value) if key == "epsilons" else tuple(str(v) for v in value)
    if key in ("episodes", "max_subset_size", "folds", "seed", "seeds_per_point", "k_max",
               "n_samples", "n_informative", "n_noise"):
        if isinstance(value, float) and not value.is_integer():
            raise ConfigError(f"{key} must be an integer, got {value}")
        return int(value)
    if key in ("alpha", "gamma", "epsilon", "svm_c"):
        return float(value)
    if key == "svm_gamma":
        return "auto" if str(value).strip().lower() == "auto" else float(value)
    if key == "start_mode" and value not in START_MODES:
        raise ConfigError(f"start_mode must be one of {START_MODES}, got {value!r}")
    return str(value)


def _parse_scalar(text: str):
    text = text.strip()
    try:
        return json.loads(text)
    except json.JSONDecodeError:
        return text.strip("'\"")


def read_config_file(path) -> dict:
    path = Path(path)
    if not path.is_file():
        raise ConfigError(f"config file not found: {path}")
    text = path.read_text(encoding="utf-8")
    try:
        raw = json.loads(text)
    except json.JSONDecodeError:
        raw = {}
        for n, line in enumerate(text.splitlines(), 1):
            line = line.split("#", 1)[0].strip()
            if not line:
                continue
            sep = "=" if "=" in line else ":" if ":" in line else None
            if sep is None:
                raise ConfigError(f"{path}:{n}: expected 'key = value'")
            key, value = line.split(sep, 1)
            raw[key.strip()] = _parse_scalar(value)
    else:
        if not isinstance(raw, dict):
            raise ConfigError(f"{path}: expected a JSON object")
        if isinstance(raw.get("config"), dict):
            raw = raw["config"]
    return raw


def resolve(file_values: Optional[dict] = None, flag_values: Optional[dict] = None) -> RunConfig:
    """Defaults, overridden by ``file_values``, overridden by non-None ``flag_values``."""
    merged = {}
    for source in (file_values or {}, {k: v for k, v in (flag_values or {}).items() if v is not None}):
        for key, value in source.items():
            key = key.replace("-", "_")
            if key not in FIELDS:
                raise ConfigError(f"unknown configuration key {key!r}")
            try:
                merged[key] = _coerce(key, value)
            except (TypeError, ValueError) as exc:
                raise ConfigError(f"bad value for {key}: {value!r} ({exc})") from None
    try:
        config = RunConfig(**merged)
    except (TypeError, ValueError) as exc:
        raise ConfigError(str(exc)) from None
    return config.validate()
