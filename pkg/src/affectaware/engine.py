"""Streaming recognition of complex activity occurrences.

Each registered definition gets its own tracker. A tracker buffers step
observations while waiting for the start set, becomes active once every
start step has been seen with its context satisfied, and closes when the
end set is complete or the stream goes quiet for longer than the timeout.
"""
from __future__ import annotations

import logging
import math
from dataclasses import dataclass, field
from typing import Callable, Iterable, Mapping

from .affect import EmotionCounters, occurrence_affect
from .labels import EMOTIONS, Emotion, Outcome, Valence
from .model import WEIGHT_TOL, ComplexActivityDef, Registry

log = logging.getLogger(__name__)

DEFAULT_TIMEOUT_MS = 30 * 60 * 1000

AWAITING_START = "awaiting-start"
ACTIVE = "active"
CLOSED = "closed"


class StreamOrderError(ValueError):
    pass


class DefinitionMismatch(KeyError):
    pass


class MissingEmotionModel(RuntimeError):
    pass


@dataclass(frozen=True)
class Event:
    timestamp: int
    step_id: int
    context_ok: bool
    emotion: Emotion | None = None
    feature_row: int | None = None
    activity: str | None = None

    def __post_init__(self):
        if self.step_id < 1:
            raise ValueError(f"step_id must be >= 1 (got {self.step_id})")
        if self.emotion is not None and self.feature_row is not None:
            raise ValueError("an event carries either an emotion or a feature row, not both")


@dataclass(frozen=True)
class OccurrenceRecord:
    code: str
    start_ms: int
    end_ms: int
    score: float
    outcome: Outcome
    counters: tuple[int, ...]
    overall_emotion: Emotion
    valence: Valence
    no_evidence: bool
    closed_by: str
    observed: tuple[tuple[int, bool], ...] = ()

    def to_dict(self) -> dict:
        return {
            "code": self.code,
            "start_ms": self.start_ms,
            "end_ms": self.end_ms,
            "score": self.score,
            "outcome": self.outcome.value,
            "counters": {e.value: n for e, n in zip(EMOTIONS, self.counters)},
            "overall_emotion": self.overall_emotion.value,
            "valence": self.valence.value,
            "no_evidence": self.no_evidence,
            "closed_by": self.closed_by,
            "observed": [[i, ok] for i, ok in self.observed],
        }

    @classmethod
    def from_dict(cls, d: dict) -> "OccurrenceRecord":
        return cls(
            code=d["code"],
            start_ms=int(d["start_ms"]),
            end_ms=int(d["end_ms"]),
            score=float(d["score"]),
            outcome=Outcome(d["outcome"]),
            counters=tuple(int(d["counters"][e.value]) for e in EMOTIONS),
            overall_emotion=Emotion(d["overall_emotion"]),
            valence=Valence(d["valence"]),
            no_evidence=bool(d["no_evidence"]),
            closed_by=d["closed_by"],
            observed=tuple((int(i), bool(ok)) for i, ok in d.get("observed", [])),
        )


def _merge_observed(def_: ComplexActivityDef,
                    observed: Mapping[int, bool] | Iterable[tuple[int, bool]]) -> dict[int, bool]:
    pairs = observed.items() if isinstance(observed, Mapping) else observed
    known = set(def_.step_ids)
    merged: dict[int, bool] = {}
    for sid, ok in pairs:
        if sid not in known:
            raise DefinitionMismatch(f"step {sid} is not part of activity {def_.code}")
        merged[sid] = merged.get(sid, False) or bool(ok)
    return merged


def score_occurrence(def_: ComplexActivityDef,
                     observed: Mapping[int, bool] | Iterable[tuple[int, bool]]) -> float:
    """Mean of the atomic-weight sum and the satisfied-context-weight sum."""
    merged = _merge_observed(def_, observed)
    atomic = math.fsum(def_.atomic_weight(s) for s in merged)
    context = math.fsum(def_.context_weight(s) for s, ok in merged.items() if ok)
    return min(1.0, max(0.0, 0.5 * (atomic + context)))


def classify_outcome(def_: ComplexActivityDef, score: float,
                     observed: Mapping[int, bool] | Iterable[tuple[int, bool]],
                     core_required: bool = True) -> Outcome:
    if score < def_.threshold - WEIGHT_TOL:
        return Outcome.FAILURE
    if core_required:
        merged = _merge_observed(def_, observed)
        if not all(merged.get(c, False) for c in def_.core_ids):
            return Outcome.FAILURE
    return Outcome.SUCCESS


@dataclass
class OccurrenceState:
    code: str
    phase: str = AWAITING_START
    start_time: int | None = None
    last_time: int | None = None
    observed: dict[int, bool] = field(default_factory=dict)
    emotions: list[Emotion] = field(default_factory=list)

    @property
    def counters(self) -> EmotionCounters:
        return EmotionCounters.from_emotions(self.emotions)

    @property
    def empty(self) -> bool:
        return self.start_time is None


class RecognitionEngine:
    """Single-stream recognizer; not thread-safe, use one instance per stream.

    Events with an ``activity`` code are routed to that definition only.
    Events without one go to every definition that has the step id.
    """

    def __init__(self, registry: Registry | Iterable[ComplexActivityDef], *,
                 timeout_ms: int = DEFAULT_TIMEOUT_MS,
                 core_required: bool = True,
                 valence_map: Mapping[Emotion, Valence] | None = None,
                 resolve_emotion: Callable[[int], Emotion] | None = None,
                 on_open: Callable[[str, int], None] | None = None):
        self.registry = registry if isinstance(registry, Registry) else Registry(registry)
        if timeout_ms <= 0:
            raise ValueError("timeout must be positive")
        self.timeout_ms = timeout_ms
        self.core_required = core_required
        self.valence_map = valence_map
        self.resolve_emotion = resolve_emotion
        self.on_open = on_open
        self.diagnostics: list[str] = []
        self._last_ts: int | None = None
        self._states = {d.code: OccurrenceState(d.code) for d in self.registry}

    def state(self, code: str) -> OccurrenceState:
        return self._states[code]

    def ingest(self, event: Event) -> list[OccurrenceRecord]:
        if self._last_ts is not None and event.timestamp < self._last_ts:
            raise StreamOrderError(
                f"event at {event.timestamp} ms precedes previous event at {self._last_ts} ms")
        self._last_ts = event.timestamp

        records = self.advance(event.timestamp)
        targets = self._targets(event)
        if not targets:
            return records
        emotion = self._emotion_of(event)
        for d in targets:
            rec = self._apply(d, event, emotion)
            if rec is not None:
                records.append(rec)
        return records

    def ingest_many(self, events: Iterable[Event]) -> list[OccurrenceRecord]:
        out: list[OccurrenceRecord] = []
        for ev in events:
            out.extend(self.ingest(ev))
        return out

    def advance(self, now_ms: int) -> list[OccurrenceRecord]:
        """Expire occurrences idle for at least the timeout as of ``now_ms``."""
        out = []
        for d in self.registry:
            st = self._states[d.code]
            if st.empty or now_ms - st.last_time < self.timeout_ms:
                continue
            if st.phase == ACTIVE:
                out.append(self._close(d, "timeout"))
            else:
                self.diagnostics.append(
                    f"{d.code}: discarded {len(st.observed)} step(s) that never reached the start set")
                self._states[d.code] = OccurrenceState(d.code)
        return out

    def finish(self) -> list[OccurrenceRecord]:
        """Close every active occurrence at end of stream."""
        out = []
        for d in self.registry:
            st = self._states[d.code]
            if st.phase == ACTIVE:
                out.append(self._close(d, "stream_end"))
            elif not st.empty:
                self.diagnostics.append(
                    f"{d.code}: stream ended before the start set of a pending occurrence")
                self._states[d.code] = OccurrenceState(d.code)
        return out

    def _targets(self, event: Event) -> list[ComplexActivityDef]:
        if event.activity is not None:
            if event.activity not in self.registry:
                self.diagnostics.append(f"ignored event at {event.timestamp}: unknown activity {event.activity}")
                return []
            d = self.registry[event.activity]
            if event.step_id not in d.step_ids:
                self.diagnostics.append(
                    f"ignored event at {event.timestamp}: step {event.step_id} not in {d.code}")
                return []
            return [d]
        found = [d for d in self.registry if event.step_id in d.step_ids]
        if not found:
            self.diagnostics.append(f"ignored event at {event.timestamp}: step {event.step_id} matches no activity")
        return found

    def _emotion_of(self, event: Event) -> Emotion | None:
        if event.feature_row is None:
            return event.emotion
        if self.resolve_emotion is None:
            raise MissingEmotionModel(
                f"event at {event.timestamp} references feature row {event.feature_row} but no emotion model is loaded")
        return self.resolve_emotion(event.feature_row)

    def _apply(self, d: ComplexActivityDef, event: Event, emotion: Emotion | None) -> OccurrenceRecord | None:
        st = self._states[d.code]
        if st.empty:
            st.start_time = event.timestamp
            if self.on_open is not None:
                self.on_open(d.code, event.timestamp)
        st.last_time = event.timestamp
        st.observed[event.step_id] = st.observed.get(event.step_id, False) or event.context_ok
        if emotion is not None:
            st.emotions.append(emotion)

        if st.phase == AWAITING_START and all(st.observed.get(s, False) for s in d.start_ids):
            st.phase = ACTIVE
            log.debug("%s started at %d", d.code, st.start_time)
        if all(s in st.observed for s in d.end_ids):
            return self._close(d, "end" if st.phase == ACTIVE else "end_without_start")
        return None

    def _close(self, d: ComplexActivityDef, reason: str) -> OccurrenceRecord:
        st = self._states[d.code]
        st.phase = CLOSED
        score = score_occurrence(d, st.observed)
        outcome = classify_outcome(d, score, st.observed, self.core_required)
        affect = occurrence_affect(st.emotions, self.valence_map)
        rec = OccurrenceRecord(
            code=d.code,
            start_ms=st.start_time,
            end_ms=st.last_time,
            score=score,
            outcome=outcome,
            counters=tuple(affect.counters.counts),
            overall_emotion=affect.overall,
            valence=affect.valence,
            no_evidence=affect.no_evidence,
            closed_by=reason,
            observed=tuple(sorted(st.observed.items())),
        )
        self._states[d.code] = OccurrenceState(d.code)
        return rec


def recognize(registry: Registry | Iterable[ComplexActivityDef], events: Iterable[Event],
              **kwargs) -> list[OccurrenceRecord]:
    engine = RecognitionEngine(registry, **kwargs)
    records = engine.ingest_many(events)
    records.extend(engine.finish())
    return records
