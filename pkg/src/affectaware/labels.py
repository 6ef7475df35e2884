"""Emotion and valence labels shared across the package."""
from __future__ import annotations

from enum import Enum


class Emotion(Enum):
    # declaration order is the canonical order used for every tie-break
    ANGRY = "Angry"
    DISGUST = "Disgust"
    FEAR = "Fear"
    HAPPY = "Happy"
    SAD = "Sad"
    SURPRISE = "Surprise"
    NEUTRAL = "Neutral"

    @property
    def index(self) -> int:
        return _EMOTION_INDEX[self]

    @classmethod
    def from_index(cls, i: int) -> "Emotion":
        return EMOTIONS[i]

    @classmethod
    def parse(cls, text: str) -> "Emotion":
        key = text.strip().lower()
        for e in cls:
            if e.value.lower() == key:
                return e
        raise ValueError(f"unknown emotion label {text!r}")

    def __str__(self) -> str:
        return self.value


EMOTIONS: tuple[Emotion, ...] = tuple(Emotion)
_EMOTION_INDEX = {e: i for i, e in enumerate(EMOTIONS)}


class Valence(Enum):
    POSITIVE = "Positive"
    NEGATIVE = "Negative"
    NEUTRAL = "Neutral"

    @classmethod
    def parse(cls, text: str) -> "Valence":
        key = text.strip().lower()
        for v in cls:
            if v.value.lower() == key:
                return v
        raise ValueError(f"unknown valence {text!r}")

    def __str__(self) -> str:
        return self.value


class Outcome(Enum):
    SUCCESS = "Success"
    FAILURE = "Failure"

    def __str__(self) -> str:
        return self.value
