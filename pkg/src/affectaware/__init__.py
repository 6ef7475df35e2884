"""Affect-aware complex activity recognition for smart-home event streams."""
from .affect import (EmotionCounters, MoodState, aggregate_emotions, map_valence, occurrence_affect,
                     update_mood)
from .engine import (Event, OccurrenceRecord, RecognitionEngine, classify_outcome, recognize,
                     score_occurrence)
from .labels import EMOTIONS, Emotion, Outcome, Valence
from .model import (ComplexActivityDef, Registry, load_bundled, parse_definitions, serialize_definitions,
                    validate_definition)

__version__ = "0.1.0"

__all__ = [
    "EMOTIONS", "ComplexActivityDef", "Emotion", "EmotionCounters", "Event", "MoodState",
    "OccurrenceRecord", "Outcome", "RecognitionEngine", "Registry", "Valence", "aggregate_emotions",
    "classify_outcome", "load_bundled", "map_valence", "occurrence_affect", "parse_definitions",
    "recognize", "score_occurrence", "serialize_definitions", "update_mood", "validate_definition",
]
