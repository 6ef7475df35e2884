"""Run configuration shared by the CLI and the pipeline.

Precedence is flags, then the config file, then these defaults.
"""
from __future__ import annotations

import json
from dataclasses import asdict, dataclass, field, fields

from .affect import DEFAULT_MOOD_WINDOW, DEFAULT_VALENCE_MAP
from .emotion.learners import KINDS
from .labels import Emotion, Valence

FORMATS = ("json", "csv", "table")


class ConfigError(ValueError):
    pass


@dataclass
class RunConfig:
    seed: int = 0
    train_fraction: float = 0.8
    z_max: float = 4.0
    learner: str = "random_forest"
    hyperparameters: dict = field(default_factory=dict)
    mood_window: int = DEFAULT_MOOD_WINDOW
    initial_mood: str = "Negative"
    timeout_min: float = 30.0
    core_required: bool = True
    format: str = "json"
    step_gap_s: float = 10.0
    valence_map: dict = field(default_factory=lambda: {e.value: v.value for e, v in DEFAULT_VALENCE_MAP.items()})
    emotion_weights: dict = field(default_factory=lambda: {e.value: 1.0 for e in Emotion})
    ux_alpha: float = 1.0
    ux_tie: str = "Negative"

    def validate(self) -> "RunConfig":
        if not isinstance(self.seed, int) or self.seed < 0:
            raise ConfigError("seed must be a non-negative integer")
        if not 0.0 < self.train_fraction < 1.0:
            raise ConfigError("train_fraction must be in (0,1)")
        if not self.z_max > 0:
            raise ConfigError("z_max must be positive")
        if self.learner not in KINDS:
            raise ConfigError(f"learner must be one of {', '.join(KINDS)}")
        if not isinstance(self.mood_window, int) or self.mood_window < 1:
            raise ConfigError("mood_window must be a positive integer")
        if not self.timeout_min > 0:
            raise ConfigError("timeout_min must be positive")
        if self.format not in FORMATS:
            raise ConfigError(f"format must be one of {', '.join(FORMATS)}")
        if self.step_gap_s <= 0:
            raise ConfigError("step_gap_s must be positive")
        if self.ux_alpha <= 0:
            raise ConfigError("ux_alpha must be positive")
        try:
            self.valence_mapping()
            self.weights()
            for v in (self.initial_mood, self.ux_tie):
                if Valence.parse(v) is Valence.NEUTRAL:
                    raise ConfigError("initial_mood and ux_tie must be Positive or Negative")
        except ValueError as exc:
            raise ConfigError(str(exc)) from None
        return self

    def valence_mapping(self) -> dict[Emotion, Valence]:
        m = dict(DEFAULT_VALENCE_MAP)
        for k, v in self.valence_map.items():
            m[Emotion.parse(k)] = Valence.parse(v)
        return m

    def weights(self) -> dict[Emotion, float]:
        w = {e: 1.0 for e in Emotion}
        for k, v in self.emotion_weights.items():
            if float(v) < 0:
                raise ConfigError("emotion weights must be non-negative")
            w[Emotion.parse(k)] = float(v)
        return w

    @property
    def timeout_ms(self) -> int:
        return int(round(self.timeout_min * 60_000))

    def to_dict(self) -> dict:
        return asdict(self)


def load_config(source: bytes | str | None, overrides: dict | None = None) -> RunConfig:
    data: dict = {}
    if source is not None:
        try:
            data = json.loads(source)
        except json.JSONDecodeError as exc:
            raise ConfigError(f"config syntax error at line {exc.lineno}: {exc.msg}") from None
        if not isinstance(data, dict):
            raise ConfigError("config must be a JSON object")
    known = {f.name for f in fields(RunConfig)}
    unknown = set(data) - known
    if unknown:
        raise ConfigError(f"unknown config keys: {', '.join(sorted(unknown))}")
    data.update({k: v for k, v in (overrides or {}).items() if v is not None})
    return RunConfig(**data).validate()
