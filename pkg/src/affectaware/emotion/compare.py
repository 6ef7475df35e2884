"""Evaluation and the side-by-side learner comparison report."""
from __future__ import annotations

import csv
import io
import json
from dataclasses import dataclass

import numpy as np

from ..labels import EMOTIONS
from .dataset import Dataset, remove_outliers, split
from .learners import KIND_NAMES, KINDS, EmotionModel, ModelError, train
from .metrics import ConfusionMatrix

EMOTION_LABELS = tuple(e.value for e in EMOTIONS)


def evaluate(model: EmotionModel, test: Dataset) -> ConfusionMatrix:
    if len(test) and test.dimension != model.dimension:
        raise ModelError(f"test dimension {test.dimension} does not match model dimension {model.dimension}")
    pred = model.predict(test.X) if len(test) else np.empty(0, dtype=np.intp)
    return ConfusionMatrix.from_predictions(test.y, pred, EMOTION_LABELS)


@dataclass(frozen=True)
class ComparisonRow:
    kind: str
    accuracy: float
    lowest_precision: float
    highest_precision: float

    @property
    def learner(self) -> str:
        return KIND_NAMES[self.kind]


@dataclass(frozen=True)
class ComparisonReport:
    rows: tuple[ComparisonRow, ...]
    n_train: int
    n_test: int
    n_removed: int

    def to_csv(self) -> str:
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(["learner", "accuracy", "lowest_precision", "highest_precision"])
        for r in self.rows:
            w.writerow([r.learner, f"{r.accuracy:.6f}", f"{r.lowest_precision:.6f}", f"{r.highest_precision:.6f}"])
        return buf.getvalue()

    def to_table(self) -> str:
        head = ("Learning Method", "Overall Accuracy", "Lowest Class Precision", "Highest Class Precision")
        body = [(r.learner, f"{100 * r.accuracy:.2f}%", f"{100 * r.lowest_precision:.2f}%",
                 f"{100 * r.highest_precision:.2f}%") for r in self.rows]
        widths = [max(len(x[i]) for x in (head, *body)) for i in range(4)]
        lines = ["  ".join(c.ljust(w) if i == 0 else c.rjust(w) for i, (c, w) in enumerate(zip(row, widths)))
                 for row in (head, *body)]
        return "\n".join(lines) + "\n"

    def to_dict(self) -> dict:
        return {"n_train": self.n_train, "n_test": self.n_test, "n_removed": self.n_removed,
                "learners": [{"learner": r.learner, "kind": r.kind, "accuracy": r.accuracy,
                              "lowest_precision": r.lowest_precision,
                              "highest_precision": r.highest_precision} for r in self.rows]}

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), indent=2) + "\n"


def precision_range(cm: ConfusionMatrix) -> tuple[float, float]:
    present = cm.present()
    if not present.any():
        return 0.0, 0.0
    p = cm.precisions[present]
    return float(p.min()), float(p.max())


def compare_learners(ds: Dataset, *, seed: int = 0, train_fraction: float = 0.8, z_max: float = 4.0,
                     hyperparameters: dict[str, dict] | None = None,
                     kinds: tuple[str, ...] = KINDS) -> ComparisonReport:
    """Outlier removal, one shared split, then train and score every learner."""
    clean = remove_outliers(ds, z_max)
    tr, te = split(clean, train_fraction, seed)
    rows = []
    for kind in kinds:
        model = train(kind, tr, (hyperparameters or {}).get(kind), seed)
        cm = evaluate(model, te)
        lo, hi = precision_range(cm)
        rows.append(ComparisonRow(kind, cm.accuracy, lo, hi))
    return ComparisonReport(tuple(rows), len(tr), len(te), len(ds) - len(clean))
