"""Seeded synthetic event traces from scenario scripts."""
from __future__ import annotations

import json
from dataclasses import dataclass, field
from importlib import resources
from typing import Mapping, Sequence

import numpy as np

from .engine import Event
from .labels import EMOTIONS, Emotion
from .model import Registry

SCENARIO_FORMAT_VERSION = 1
MODES = ("full", "partial", "abandoned")


class ScenarioError(ValueError):
    pass


EmotionScript = Emotion | Sequence[Emotion | None] | Mapping[Emotion, float] | None


@dataclass(frozen=True)
class ScenarioItem:
    code: str
    mode: str = "full"
    omit: frozenset[int] = frozenset()
    emotions: EmotionScript = None
    start_offset_min: float = 0.0


@dataclass(frozen=True)
class Scenario:
    items: tuple[ScenarioItem, ...]
    name: str = ""
    start_ms: int = 0
    step_gap_s: float | None = None
    extra: dict = field(default_factory=dict, compare=False)

    def validate(self, registry: Registry) -> None:
        for i, it in enumerate(self.items, start=1):
            if it.code not in registry:
                raise ScenarioError(f"activity #{i}: unknown code {it.code!r}")
            if it.mode not in MODES:
                raise ScenarioError(f"activity #{i}: unknown mode {it.mode!r}")
            bad = it.omit - set(registry[it.code].step_ids)
            if bad:
                raise ScenarioError(f"activity #{i}: omitted step ids {sorted(bad)} not in {it.code}")
            if it.start_offset_min < 0:
                raise ScenarioError(f"activity #{i}: start offset must be >= 0")


def _script_from_json(value, where: str) -> EmotionScript:
    try:
        if value is None:
            return None
        if isinstance(value, str):
            return Emotion.parse(value)
        if isinstance(value, list):
            return tuple(None if v in (None, "-") else Emotion.parse(v) for v in value)
        if isinstance(value, dict):
            dist = {Emotion.parse(k): float(p) for k, p in value.items()}
            if any(p < 0 for p in dist.values()) or sum(dist.values()) <= 0:
                raise ScenarioError(f"{where}: emotion distribution needs non-negative weights with a positive sum")
            return dist
    except ValueError as exc:
        raise ScenarioError(f"{where}: {exc}") from None
    raise ScenarioError(f"{where}: emotions must be a label, a list or a distribution")


def _script_to_json(script: EmotionScript):
    if script is None:
        return None
    if isinstance(script, Emotion):
        return script.value
    if isinstance(script, Mapping):
        return {e.value: p for e, p in script.items()}
    return [None if e is None else e.value for e in script]


def parse_scenario(source: bytes | str) -> Scenario:
    try:
        doc = json.loads(source)
    except json.JSONDecodeError as exc:
        raise ScenarioError(f"syntax error at line {exc.lineno} column {exc.colno}: {exc.msg}") from None
    if not isinstance(doc, dict) or "activities" not in doc:
        raise ScenarioError("scenario must be an object with an 'activities' list")
    version = doc.get("format_version")
    if version != SCENARIO_FORMAT_VERSION:
        raise ScenarioError(f"unsupported scenario format_version {version!r}")
    items = []
    for i, a in enumerate(doc["activities"], start=1):
        where = f"activity #{i}"
        if not isinstance(a, dict) or "code" not in a:
            raise ScenarioError(f"{where}: needs a 'code'")
        mode = a.get("mode", "full")
        omit = a.get("omit", [])
        if isinstance(mode, str) and mode.startswith("partial:"):
            omit = [int(t) for t in mode.split(":", 1)[1].split(",") if t.strip()]
            mode = "partial"
        items.append(ScenarioItem(
            code=a["code"],
            mode=mode,
            omit=frozenset(int(x) for x in omit),
            emotions=_script_from_json(a.get("emotions"), where),
            start_offset_min=float(a.get("start_offset_min", 0.0)),
        ))
    gap = doc.get("step_gap_s")
    return Scenario(tuple(items), doc.get("name", ""), int(doc.get("start_ms", 0)),
                    None if gap is None else float(gap))


def scenario_to_dict(s: Scenario) -> dict:
    d = {"format_version": SCENARIO_FORMAT_VERSION, "name": s.name, "start_ms": s.start_ms}
    if s.step_gap_s is not None:
        d["step_gap_s"] = s.step_gap_s
    d["activities"] = [
        {"code": it.code, "mode": it.mode, "omit": sorted(it.omit),
         "start_offset_min": it.start_offset_min, "emotions": _script_to_json(it.emotions)}
        for it in s.items
    ]
    return d


def bundled_scenario(name: str = "morning_routine") -> Scenario:
    path = resources.files("affectaware") / "data" / "scenarios" / f"{name}.json"
    return parse_scenario(path.read_bytes())


def _draw(script: EmotionScript, k: int, rng: np.random.Generator) -> Emotion | None:
    if script is None:
        return None
    if isinstance(script, Emotion):
        return script
    if isinstance(script, Mapping):
        labels = [e for e in EMOTIONS if e in script]
        p = np.array([script[e] for e in labels], dtype=np.float64)
        return labels[int(rng.choice(len(labels), p=p / p.sum()))]
    return script[k] if k < len(script) else None


def simulate_trace(registry: Registry, scenario: Scenario, seed: int = 0,
                   step_gap_s: float = 10.0) -> list[Event]:
    """Emit the scenario's step events in timestamp order.

    ``full`` emits every step, ``partial`` skips the omitted ids, and
    ``abandoned`` emits only the start steps. Contexts always hold. Every
    event names its activity so overlapping activities stay separate.
    """
    scenario.validate(registry)
    gap_ms = int(round((scenario.step_gap_s or step_gap_s) * 1000))
    rng = np.random.default_rng(seed)
    tagged: list[tuple[int, int, Event]] = []
    for item in scenario.items:
        d = registry[item.code]
        if item.mode == "abandoned":
            ids = sorted(d.start_ids)
        else:
            ids = [s for s in d.step_ids if s not in item.omit]
        t0 = scenario.start_ms + int(round(item.start_offset_min * 60_000))
        for k, sid in enumerate(ids):
            ev = Event(t0 + k * gap_ms, sid, True, _draw(item.emotions, k, rng), None, d.code)
            tagged.append((ev.timestamp, len(tagged), ev))
    tagged.sort(key=lambda t: (t[0], t[1]))
    return [ev for _, _, ev in tagged]
