"""Per-occurrence emotion aggregation, valence mapping and rolling mood."""
from __future__ import annotations

from dataclasses import dataclass, field
from typing import Iterable, Mapping, Sequence

from .labels import EMOTIONS, Emotion, Valence

DEFAULT_VALENCE_MAP: dict[Emotion, Valence] = {
    Emotion.ANGRY: Valence.NEGATIVE,
    Emotion.DISGUST: Valence.NEGATIVE,
    Emotion.FEAR: Valence.NEGATIVE,
    Emotion.HAPPY: Valence.POSITIVE,
    Emotion.SAD: Valence.NEGATIVE,
    Emotion.SURPRISE: Valence.POSITIVE,
    Emotion.NEUTRAL: Valence.NEUTRAL,
}

DEFAULT_MOOD_WINDOW = 5


@dataclass
class EmotionCounters:
    counts: list[int] = field(default_factory=lambda: [0] * len(EMOTIONS))

    @classmethod
    def from_emotions(cls, emotions: Iterable[Emotion]) -> "EmotionCounters":
        c = cls()
        for e in emotions:
            c.add(e)
        return c

    @classmethod
    def from_mapping(cls, m: Mapping[Emotion, int]) -> "EmotionCounters":
        c = cls()
        for e, n in m.items():
            if n < 0:
                raise ValueError("emotion counters must be non-negative")
            c.counts[e.index] = int(n)
        return c

    def add(self, e: Emotion) -> None:
        self.counts[e.index] += 1

    def __getitem__(self, e: Emotion) -> int:
        return self.counts[e.index]

    @property
    def total(self) -> int:
        return sum(self.counts)

    def as_dict(self) -> dict[str, int]:
        return {e.value: n for e, n in zip(EMOTIONS, self.counts)}


def aggregate_emotions(c: EmotionCounters | Sequence[int]) -> Emotion:
    """Overall emotion: the strictly largest counter.

    Ties, including the all-zero case, go to the emotion that comes first
    in canonical order.
    """
    counts = c.counts if isinstance(c, EmotionCounters) else c
    best = 0
    for i in range(1, len(EMOTIONS)):
        if counts[i] > counts[best]:
            best = i
    return EMOTIONS[best]


def map_valence(e: Emotion, mapping: Mapping[Emotion, Valence] | None = None) -> Valence:
    return (mapping or DEFAULT_VALENCE_MAP)[e]


@dataclass(frozen=True)
class OccurrenceAffect:
    counters: EmotionCounters
    overall: Emotion
    valence: Valence
    no_evidence: bool


def occurrence_affect(emotions: Iterable[Emotion | None],
                      mapping: Mapping[Emotion, Valence] | None = None) -> OccurrenceAffect:
    """Tally the emotions seen during one occurrence; ``None`` entries are skipped."""
    counters = EmotionCounters.from_emotions(e for e in emotions if e is not None)
    overall = aggregate_emotions(counters)
    return OccurrenceAffect(counters, overall, map_valence(overall, mapping), counters.total == 0)


@dataclass(frozen=True)
class MoodState:
    """Rolling mood over the last ``window_size`` occurrence valences.

    Each window entry is ``(valence, weight, mood_before)``, where
    ``mood_before`` is the mood held just before that entry was pushed.
    """

    window_size: int = DEFAULT_MOOD_WINDOW
    window: tuple[tuple[Valence, float, Valence], ...] = ()
    current_mood: Valence = Valence.NEGATIVE

    def __post_init__(self):
        if self.window_size < 1:
            raise ValueError("mood window size must be positive")

    @property
    def valences(self) -> tuple[Valence, ...]:
        return tuple(e[0] for e in self.window)

    @property
    def anchor(self) -> Valence:
        """Mood in force immediately before the oldest window entry."""
        return self.window[0][2] if self.window else self.current_mood


def update_mood(state: MoodState, v: Valence, weight: float = 1.0) -> MoodState:
    """Push one occurrence valence and recompute the mood.

    The mood is the (weighted) majority of non-Neutral valences in the
    window. A tie or an all-Neutral window falls back to the mood that
    held just before the window began, so the result depends only on the
    window and that anchor.
    """
    window = (state.window + ((v, float(weight), state.current_mood),))[-state.window_size:]
    pos = sum(w for val, w, _ in window if val is Valence.POSITIVE)
    neg = sum(w for val, w, _ in window if val is Valence.NEGATIVE)
    if pos > neg:
        mood = Valence.POSITIVE
    elif neg > pos:
        mood = Valence.NEGATIVE
    else:
        mood = window[0][2]
    return MoodState(state.window_size, window, mood)


def mood_after(valences: Iterable[Valence], window_size: int = DEFAULT_MOOD_WINDOW,
               initial: Valence = Valence.NEGATIVE) -> Valence:
    state = MoodState(window_size, (), initial)
    for v in valences:
        state = update_mood(state, v)
    return state.current_mood
