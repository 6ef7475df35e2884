from __future__ import annotations

from dataclasses import dataclass
from typing import Sequence

import numpy as np


@dataclass(frozen=True)
class ConfusionMatrix:
    """Count grid indexed ``counts[predicted][true]``.

    Empty rows give precision 0 and empty columns give recall 0.
    """

    labels: tuple[str, ...]
    counts: np.ndarray

    def __post_init__(self):
        counts = np.asarray(self.counts, dtype=np.int64)
        k = len(self.labels)
        if counts.shape != (k, k):
            raise ValueError(f"counts must be {k}x{k}")
        if (counts < 0).any():
            raise ValueError("counts must be non-negative")
        object.__setattr__(self, "labels", tuple(self.labels))
        object.__setattr__(self, "counts", counts)

    @classmethod
    def from_predictions(cls, true: Sequence[int], pred: Sequence[int], labels: Sequence[str]) -> "ConfusionMatrix":
        k = len(labels)
        counts = np.zeros((k, k), dtype=np.int64)
        np.add.at(counts, (np.asarray(pred, dtype=np.intp), np.asarray(true, dtype=np.intp)), 1)
        return cls(tuple(labels), counts)

    @property
    def total(self) -> int:
        return int(self.counts.sum())

    @property
    def accuracy(self) -> float:
        t = self.total
        return float(np.trace(self.counts)) / t if t else 0.0

    @property
    def precisions(self) -> np.ndarray:
        rows = self.counts.sum(axis=1)
        diag = np.diag(self.counts).astype(np.float64)
        return np.divide(diag, rows, out=np.zeros(len(self.labels)), where=rows > 0)

    @property
    def recalls(self) -> np.ndarray:
        cols = self.counts.sum(axis=0)
        diag = np.diag(self.counts).astype(np.float64)
        return np.divide(diag, cols, out=np.zeros(len(self.labels)), where=cols > 0)

    def precision(self, label: str) -> float:
        return float(self.precisions[self.labels.index(label)])

    def recall(self, label: str) -> float:
        return float(self.recalls[self.labels.index(label)])

    def present(self) -> np.ndarray:
        """Mask of classes that occur among the true labels."""
        return self.counts.sum(axis=0) > 0

    def to_dict(self) -> dict:
        return {
            "labels": list(self.labels),
            "counts": self.counts.tolist(),
            "accuracy": self.accuracy,
            "precision": dict(zip(self.labels, map(float, self.precisions))),
            "recall": dict(zip(self.labels, map(float, self.recalls))),
        }

    def to_text(self) -> str:
        head = [""] + [f"true {l}" for l in self.labels] + ["class precision"]
        body = [[f"pred. {l}"] + [str(int(v)) for v in row] + [f"{100 * p:.2f}%"]
                for l, row, p in zip(self.labels, self.counts, self.precisions)]
        body.append(["class recall"] + [f"{100 * r:.2f}%" for r in self.recalls] + [""])
        grid = [head] + body
        widths = [max(len(r[i]) for r in grid) for i in range(len(head))]
        lines = [f"accuracy: {100 * self.accuracy:.2f}%", ""]
        lines += ["  ".join(c.rjust(w) if i else c.ljust(w) for i, (c, w) in enumerate(zip(r, widths))).rstrip()
                  for r in grid]
        return "\n".join(lines) + "\n"
