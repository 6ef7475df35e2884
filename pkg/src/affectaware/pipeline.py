"""End-to-end run: recognition, per-occurrence affect, mood, UX forecasts."""
from __future__ import annotations

import json
from dataclasses import dataclass, field
from typing import Callable, Iterable

import numpy as np

from .affect import MoodState, update_mood
from .config import RunConfig
from .engine import Event, OccurrenceRecord, RecognitionEngine
from .labels import EMOTIONS, Emotion, Outcome, Valence
from .model import Registry
from .ux import RulePredictor

REPORT_FORMAT_VERSION = 1


@dataclass
class PipelineReport:
    config: dict
    records: list[OccurrenceRecord] = field(default_factory=list)
    forecasts: list[dict] = field(default_factory=list)
    mood_timeline: list[dict] = field(default_factory=list)
    next_forecast: dict | None = None
    diagnostics: list[str] = field(default_factory=list)

    @property
    def final_mood(self) -> Valence:
        return Valence(self.next_forecast["mood"])

    def summary(self) -> dict:
        ok = sum(r.outcome is Outcome.SUCCESS for r in self.records)
        return {"occurrences": len(self.records), "successes": ok, "failures": len(self.records) - ok,
                "no_evidence": sum(r.no_evidence for r in self.records),
                "final_mood": self.next_forecast["mood"]}

    def to_dict(self) -> dict:
        return {
            "format_version": REPORT_FORMAT_VERSION,
            "config": self.config,
            "records": [r.to_dict() for r in self.records],
            "forecasts": self.forecasts,
            "mood_timeline": self.mood_timeline,
            "next_forecast": self.next_forecast,
            "summary": self.summary(),
            "diagnostics": self.diagnostics,
        }

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), indent=2) + "\n"

    @classmethod
    def from_dict(cls, d: dict) -> "PipelineReport":
        if d.get("format_version") != REPORT_FORMAT_VERSION:
            raise ValueError(f"unsupported report format_version {d.get('format_version')!r}")
        return cls(d["config"], [OccurrenceRecord.from_dict(r) for r in d["records"]], d["forecasts"],
                   d["mood_timeline"], d["next_forecast"], d.get("diagnostics", []))

    def to_table(self) -> str:
        lines = [f"{'code':<6} {'start_ms':>10} {'end_ms':>10} {'score':>6} {'outcome':<8} "
                 f"{'emotion':<9} {'valence':<9} mood"]
        for r, t in zip(self.records, self.mood_timeline):
            lines.append(f"{r.code:<6} {r.start_ms:>10} {r.end_ms:>10} {r.score:>6.2f} {r.outcome.value:<8} "
                         f"{r.overall_emotion.value:<9} {r.valence.value:<9} {t['mood']}")
        nf = self.next_forecast
        lines.append(f"final mood {nf['mood']}; next activity UX if success {nf['if_success']['ux']}, "
                     f"if failure {nf['if_failure']['ux']}")
        return "\n".join(lines) + "\n"


def _forecast(predictor, mood: Valence) -> dict:
    out = {"mood": mood.value}
    for key, outcome in (("if_success", Valence.POSITIVE), ("if_failure", Valence.NEGATIVE)):
        p = predictor.predict(mood, outcome)
        out[key] = {"ux": p.label.value, "confidence_positive": p.confidence_positive,
                    "confidence_negative": p.confidence_negative}
    return out


def model_resolver(model, features: np.ndarray) -> Callable[[int], Emotion]:
    """Classify referenced feature rows lazily, caching each row's label."""
    cache: dict[int, Emotion] = {}

    def resolve(row: int) -> Emotion:
        if row not in cache:
            if not 0 <= row < features.shape[0]:
                raise IndexError(f"feature row {row} out of range (have {features.shape[0]})")
            cache[row] = EMOTIONS[int(model.predict(features[row])[0])]
        return cache[row]

    return resolve


def run_pipeline(registry: Registry, events: Iterable[Event], config: RunConfig | None = None, *,
                 resolve_emotion: Callable[[int], Emotion] | None = None,
                 ux_predictor=None) -> PipelineReport:
    """Run the full affect pipeline over one resident's event stream.

    A UX forecast for both possible outcomes is emitted when an occurrence
    receives its first event, using the mood at that moment.
    """
    config = config or RunConfig()
    predictor = ux_predictor or RulePredictor()
    weights = config.weights()
    report = PipelineReport(config.to_dict())
    mood = MoodState(config.mood_window, (), Valence.parse(config.initial_mood))
    open_forecasts: dict[tuple[str, int], dict] = {}

    def on_open(code: str, ts: int) -> None:
        fc = {"code": code, "timestamp_ms": ts, "occurrence": None, **_forecast(predictor, mood.current_mood)}
        report.forecasts.append(fc)
        open_forecasts[(code, ts)] = fc

    engine = RecognitionEngine(registry, timeout_ms=config.timeout_ms, core_required=config.core_required,
                               valence_map=config.valence_mapping(), resolve_emotion=resolve_emotion,
                               on_open=on_open)

    def absorb(records: list[OccurrenceRecord]) -> None:
        nonlocal mood
        for rec in records:
            idx = len(report.records)
            report.records.append(rec)
            fc = open_forecasts.pop((rec.code, rec.start_ms), None)
            if fc is not None:
                fc["occurrence"] = idx
            # no-evidence occurrences are reported but do not move the mood
            if not rec.no_evidence:
                mood = update_mood(mood, rec.valence, weights[rec.overall_emotion])
            report.mood_timeline.append({"occurrence": idx, "code": rec.code, "end_ms": rec.end_ms,
                                         "valence": rec.valence.value, "counted": not rec.no_evidence,
                                         "mood": mood.current_mood.value})

    for ev in events:
        absorb(engine.ingest(ev))
    absorb(engine.finish())
    report.next_forecast = _forecast(predictor, mood.current_mood)
    report.diagnostics = list(engine.diagnostics)
    return report
