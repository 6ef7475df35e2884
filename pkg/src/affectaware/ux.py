"""User-experience prediction from (mood, outcome).

Two predictors: the fixed rule table, and a smoothed conditional
probability table learned from labelled samples.
"""
from __future__ import annotations

import csv
import io
import json
from dataclasses import dataclass
from typing import Iterable, Sequence

from .emotion.metrics import ConfusionMatrix
from .labels import Outcome, Valence

POS, NEG = Valence.POSITIVE, Valence.NEGATIVE
BINARY = (POS, NEG)
UX_LABELS = ("Positive", "Negative")
UX_FORMAT_VERSION = 1

RULES: dict[tuple[Valence, Valence], Valence] = {
    (POS, POS): POS,
    (POS, NEG): NEG,
    (NEG, POS): POS,
    (NEG, NEG): NEG,
}


class UXError(ValueError):
    pass


def as_binary(v: Valence | Outcome | str) -> Valence:
    """Coerce a mood/outcome/UX value to Positive or Negative."""
    if isinstance(v, Outcome):
        return POS if v is Outcome.SUCCESS else NEG
    if isinstance(v, str):
        key = v.strip().lower()
        if key in ("success", "positive"):
            return POS
        if key in ("failure", "negative"):
            return NEG
        raise UXError(f"expected Positive or Negative, got {v!r}")
    if v not in BINARY:
        raise UXError(f"expected Positive or Negative, got {v}")
    return v


@dataclass(frozen=True)
class UXSample:
    mood: Valence
    outcome: Valence
    ux: Valence

    def __post_init__(self):
        for name in ("mood", "outcome", "ux"):
            object.__setattr__(self, name, as_binary(getattr(self, name)))


@dataclass(frozen=True)
class UXPrediction:
    label: Valence
    confidence_positive: float
    confidence_negative: float


def predict_rule(mood, outcome) -> Valence:
    return RULES[(as_binary(mood), as_binary(outcome))]


@dataclass(frozen=True)
class UXModel:
    """Per-cell ``P(ux | mood, outcome)`` with Laplace smoothing ``alpha``."""

    alpha: float
    counts: dict[tuple[Valence, Valence], tuple[int, int]]
    tie_label: Valence = NEG

    def confidence_positive(self, mood, outcome) -> float:
        pos, neg = self.counts.get((as_binary(mood), as_binary(outcome)), (0, 0))
        return (pos + self.alpha) / (pos + neg + 2 * self.alpha)

    def to_dict(self) -> dict:
        return {
            "format_version": UX_FORMAT_VERSION,
            "alpha": self.alpha,
            "tie_label": self.tie_label.value,
            "cells": [{"mood": m.value, "outcome": o.value, "positive": self.counts.get((m, o), (0, 0))[0],
                       "negative": self.counts.get((m, o), (0, 0))[1]} for m in BINARY for o in BINARY],
        }

    @classmethod
    def from_dict(cls, d: dict) -> "UXModel":
        if d.get("format_version") != UX_FORMAT_VERSION:
            raise UXError(f"unsupported UX model format_version {d.get('format_version')!r}")
        counts = {(as_binary(c["mood"]), as_binary(c["outcome"])): (int(c["positive"]), int(c["negative"]))
                  for c in d["cells"]}
        return cls(float(d["alpha"]), counts, as_binary(d.get("tie_label", "Negative")))


def train_ux(samples: Iterable[UXSample], alpha: float = 1.0, tie_label: Valence = NEG) -> UXModel:
    samples = list(samples)
    if not samples:
        raise UXError("cannot train on zero samples")
    if alpha <= 0:
        raise UXError("smoothing alpha must be positive")
    counts: dict[tuple[Valence, Valence], list[int]] = {(m, o): [0, 0] for m in BINARY for o in BINARY}
    for s in samples:
        counts[(s.mood, s.outcome)][0 if s.ux is POS else 1] += 1
    return UXModel(float(alpha), {k: (p, n) for k, (p, n) in counts.items()}, as_binary(tie_label))


def predict_ux(model: UXModel, mood, outcome) -> UXPrediction:
    cp = model.confidence_positive(mood, outcome)
    cn = 1.0 - cp
    if cp > cn:
        label = POS
    elif cn > cp:
        label = NEG
    else:
        label = model.tie_label
    return UXPrediction(label, cp, cn)


def prediction_from_confidences(cp: float, cn: float, tie_label: Valence = NEG) -> UXPrediction:
    label = POS if cp > cn else NEG if cn > cp else tie_label
    return UXPrediction(label, cp, cn)


class RulePredictor:
    def predict(self, mood, outcome) -> UXPrediction:
        label = predict_rule(mood, outcome)
        return UXPrediction(label, 1.0 if label is POS else 0.0, 0.0 if label is POS else 1.0)


class LearnedPredictor:
    def __init__(self, model: UXModel):
        self.model = model

    def predict(self, mood, outcome) -> UXPrediction:
        return predict_ux(self.model, mood, outcome)


def evaluate_ux(predictor, samples: Sequence[UXSample]) -> tuple[ConfusionMatrix, list[UXPrediction]]:
    if not samples:
        raise UXError("cannot evaluate on zero samples")
    preds = [predictor.predict(s.mood, s.outcome) for s in samples]
    idx = {POS: 0, NEG: 1}
    cm = ConfusionMatrix.from_predictions([idx[s.ux] for s in samples], [idx[p.label] for p in preds], UX_LABELS)
    return cm, preds


def read_ux_samples(source: bytes | str) -> list[UXSample]:
    """CSV with header ``mood,outcome,ux``; extra columns are ignored."""
    if isinstance(source, bytes):
        source = source.decode("utf-8")
    reader = csv.DictReader(io.StringIO(source))
    if reader.fieldnames is None or not {"mood", "outcome", "ux"} <= {f.strip().lower() for f in reader.fieldnames}:
        raise UXError("UX sample file needs columns mood,outcome,ux")
    out = []
    for n, row in enumerate(reader, start=2):
        row = {k.strip().lower(): v for k, v in row.items() if k is not None}
        try:
            out.append(UXSample(row["mood"], row["outcome"], row["ux"]))
        except UXError as exc:
            raise UXError(f"line {n}: {exc}") from None
    return out


def write_ux_samples(samples: Iterable[UXSample]) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(["mood", "outcome", "ux"])
    for s in samples:
        w.writerow([s.mood.value, s.outcome.value, s.ux.value])
    return buf.getvalue()


def write_predictions(samples: Sequence[UXSample], preds: Sequence[UXPrediction]) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(["row", "ux", "prediction", "confidence_positive", "confidence_negative", "mood", "outcome"])
    for i, (s, p) in enumerate(zip(samples, preds), start=1):
        w.writerow([i, s.ux.value, p.label.value, f"{p.confidence_positive:.3f}", f"{p.confidence_negative:.3f}",
                    s.mood.value, s.outcome.value])
    return buf.getvalue()


def save_ux_model(model: UXModel) -> str:
    return json.dumps(model.to_dict(), indent=2) + "\n"


def load_ux_model(source: bytes | str) -> UXModel:
    try:
        return UXModel.from_dict(json.loads(source))
    except (KeyError, TypeError, json.JSONDecodeError) as exc:
        raise UXError(f"malformed UX model file: {exc}") from None
