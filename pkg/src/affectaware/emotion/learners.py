"""Emotion classifiers: CART tree, random forest, Gaussian naive Bayes, k-NN.

Labels are canonical emotion indices. Every tie (leaf majority, forest
vote, neighbour ranking, posterior) resolves to the lowest index.
"""
from __future__ import annotations

import json
import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from typing import Any

import numpy as np

from .. import kernels
from ..labels import EMOTIONS, Emotion
from .dataset import Dataset, DatasetError

N_CLASSES = len(EMOTIONS)
MODEL_FORMAT_VERSION = 1

KINDS = ("decision_tree", "random_forest", "naive_bayes", "knn")
KIND_NAMES = {
    "decision_tree": "Decision Tree",
    "random_forest": "Random Forest",
    "naive_bayes": "Naive Bayes",
    "knn": "K-NN",
}

DEFAULT_HYPERPARAMETERS: dict[str, dict[str, Any]] = {
    "decision_tree": {"max_depth": 20, "min_leaf": 2},
    "random_forest": {"n_trees": 100, "max_depth": 20, "min_leaf": 2,
                      "max_features": "sqrt", "bootstrap": True, "n_jobs": 1},
    "naive_bayes": {"var_floor": 1e-9},
    "knn": {"k": 5},
}


class ModelError(ValueError):
    pass


def _majority(counts: np.ndarray) -> int:
    return int(np.argmax(counts))


class DecisionTree:
    """CART with Gini impurity, grown to purity, depth cap or minimum leaf size."""

    def __init__(self, max_depth: int = 20, min_leaf: int = 2, max_features: int | None = None):
        if max_depth < 0 or min_leaf < 1:
            raise ValueError("max_depth >= 0 and min_leaf >= 1 required")
        self.max_depth = max_depth
        self.min_leaf = min_leaf
        self.max_features = max_features
        self.feature = self.threshold = self.left = self.right = self.value = None

    def fit(self, X: np.ndarray, y: np.ndarray, sample_idx: np.ndarray | None = None,
            rng: np.random.Generator | None = None) -> "DecisionTree":
        n, dim = X.shape
        idx = np.arange(n, dtype=np.intp) if sample_idx is None else np.asarray(sample_idx, dtype=np.intp)
        if idx.size == 0:
            raise DatasetError("cannot train on an empty set")
        n_feat = dim if self.max_features is None else min(dim, self.max_features)
        if n_feat < dim and rng is None:
            raise ValueError("feature subsampling needs a random generator")

        feature, threshold, left, right, value = [], [], [], [], []

        def new_node(label: int) -> int:
            feature.append(-1)
            threshold.append(0.0)
            left.append(-1)
            right.append(-1)
            value.append(label)
            return len(value) - 1

        # depth-first, left child first: node numbering is deterministic
        root = new_node(0)
        stack = [(root, idx, 0)]
        while stack:
            node, members, depth = stack.pop()
            labels = y[members]
            counts = np.bincount(labels, minlength=N_CLASSES)
            value[node] = _majority(counts)
            m = members.size
            if depth >= self.max_depth or np.count_nonzero(counts) <= 1 or m < 2 * self.min_leaf:
                continue
            if n_feat < dim:
                cols = np.sort(rng.choice(dim, size=n_feat, replace=False))
            else:
                cols = np.arange(dim)
            sub = X[np.ix_(members, cols)]
            order = np.argsort(sub, axis=0, kind="stable")
            xs = np.take_along_axis(sub, order, axis=0).T
            ys = labels[order].T
            parent = float(np.dot(counts, counts)) / m
            col, pos, _ = kernels.scan_splits(xs, ys, N_CLASSES, self.min_leaf, parent)
            if col < 0:
                continue
            lo, hi = xs[col, pos], xs[col, pos + 1]
            thr = (lo + hi) / 2.0
            if not lo <= thr < hi:
                thr = lo
            f = int(cols[col])
            goes_left = X[members, f] <= thr
            feature[node] = f
            threshold[node] = float(thr)
            li = new_node(0)
            ri = new_node(0)
            left[node], right[node] = li, ri
            stack.append((ri, members[~goes_left], depth + 1))
            stack.append((li, members[goes_left], depth + 1))

        self.feature = np.array(feature, dtype=np.intp)
        self.threshold = np.array(threshold, dtype=np.float64)
        self.left = np.array(left, dtype=np.intp)
        self.right = np.array(right, dtype=np.intp)
        self.value = np.array(value, dtype=np.intp)
        return self

    @property
    def node_count(self) -> int:
        return int(self.value.size)

    def predict(self, X: np.ndarray) -> np.ndarray:
        leaves = kernels.tree_apply(X, self.feature, self.threshold, self.left, self.right)
        return self.value[leaves]

    def to_dict(self) -> dict:
        return {"feature": self.feature.tolist(), "threshold": self.threshold.tolist(),
                "left": self.left.tolist(), "right": self.right.tolist(), "value": self.value.tolist()}

    @classmethod
    def from_dict(cls, d: dict, max_depth: int = 20, min_leaf: int = 2) -> "DecisionTree":
        t = cls(max_depth, min_leaf)
        t.feature = np.array(d["feature"], dtype=np.intp)
        t.threshold = np.array(d["threshold"], dtype=np.float64)
        t.left = np.array(d["left"], dtype=np.intp)
        t.right = np.array(d["right"], dtype=np.intp)
        t.value = np.array(d["value"], dtype=np.intp)
        return t


def resolve_max_features(spec, dim: int) -> int:
    if spec in (None, "all"):
        return dim
    if spec == "sqrt":
        return max(1, math.ceil(math.sqrt(dim)))
    if isinstance(spec, (int, np.integer)) and spec >= 1:
        return min(int(spec), dim)
    raise ValueError(f"invalid max_features {spec!r}")


class RandomForest:
    """Bagged CART trees with per-split feature subsampling and majority vote.

    Tree ``i`` draws from its own generator, spawned from the master seed, so
    parallel and sequential training give the same forest.
    """

    def __init__(self, n_trees: int = 100, max_depth: int = 20, min_leaf: int = 2,
                 max_features="sqrt", bootstrap: bool = True, n_jobs: int = 1, seed: int = 0):
        if n_trees < 1:
            raise ValueError("n_trees must be positive")
        self.n_trees = n_trees
        self.max_depth = max_depth
        self.min_leaf = min_leaf
        self.max_features = max_features
        self.bootstrap = bootstrap
        self.n_jobs = n_jobs
        self.seed = seed
        self.trees: list[DecisionTree] = []

    def fit(self, X: np.ndarray, y: np.ndarray) -> "RandomForest":
        n, dim = X.shape
        if n == 0:
            raise DatasetError("cannot train on an empty set")
        n_feat = resolve_max_features(self.max_features, dim)
        seeds = np.random.SeedSequence(self.seed).spawn(self.n_trees)

        def grow(ss: np.random.SeedSequence) -> DecisionTree:
            rng = np.random.default_rng(ss)
            idx = rng.integers(0, n, size=n) if self.bootstrap else np.arange(n)
            tree = DecisionTree(self.max_depth, self.min_leaf, None if n_feat >= dim else n_feat)
            return tree.fit(X, y, idx, rng)

        if self.n_jobs > 1:
            with ThreadPoolExecutor(self.n_jobs) as pool:
                self.trees = list(pool.map(grow, seeds))
        else:
            self.trees = [grow(s) for s in seeds]
        return self

    def predict(self, X: np.ndarray) -> np.ndarray:
        votes = np.zeros((X.shape[0], N_CLASSES), dtype=np.int64)
        rows = np.arange(X.shape[0])
        for t in self.trees:
            votes[rows, t.predict(X)] += 1
        return np.argmax(votes, axis=1).astype(np.intp)


class NaiveBayes:
    """Gaussian naive Bayes with an absolute per-feature variance floor."""

    def __init__(self, var_floor: float = 1e-9):
        if var_floor <= 0:
            raise ValueError("var_floor must be positive")
        self.var_floor = var_floor
        self.classes = self.log_prior = self.mean = self.var = None

    def fit(self, X: np.ndarray, y: np.ndarray) -> "NaiveBayes":
        if X.shape[0] == 0:
            raise DatasetError("cannot train on an empty set")
        self.classes = np.unique(y).astype(np.intp)
        self.mean = np.array([X[y == c].mean(axis=0) for c in self.classes])
        self.var = np.maximum(np.array([X[y == c].var(axis=0) for c in self.classes]), self.var_floor)
        counts = np.array([(y == c).sum() for c in self.classes], dtype=np.float64)
        self.log_prior = np.log(counts / counts.sum())
        return self

    def log_posterior(self, X: np.ndarray) -> np.ndarray:
        out = np.empty((X.shape[0], self.classes.size))
        for i in range(self.classes.size):
            ll = -0.5 * (np.log(2.0 * np.pi * self.var[i]) + (X - self.mean[i]) ** 2 / self.var[i])
            out[:, i] = self.log_prior[i] + ll.sum(axis=1)
        return out

    def predict(self, X: np.ndarray) -> np.ndarray:
        return self.classes[np.argmax(self.log_posterior(X), axis=1)]


class KNearest:
    def __init__(self, k: int = 5):
        if k < 1:
            raise ValueError("k must be positive")
        self.k = k
        self.X = self.y = None

    def fit(self, X: np.ndarray, y: np.ndarray) -> "KNearest":
        if X.shape[0] == 0:
            raise DatasetError("cannot train on an empty set")
        self.X = np.ascontiguousarray(X, dtype=np.float64)
        self.y = np.ascontiguousarray(y, dtype=np.intp)
        return self

    def predict(self, X: np.ndarray) -> np.ndarray:
        return kernels.knn_predict(self.X, self.y, X, self.k, N_CLASSES)


@dataclass(frozen=True)
class EmotionModel:
    kind: str
    dimension: int
    seed: int
    hyperparameters: dict
    estimator: Any = field(repr=False, compare=False)

    def predict(self, X: np.ndarray) -> np.ndarray:
        X = np.asarray(X, dtype=np.float64)
        if X.ndim == 1:
            X = X[None, :]
        if X.shape[1] != self.dimension:
            raise ModelError(f"feature dimension {X.shape[1]} does not match model dimension {self.dimension}")
        return self.estimator.predict(X)

    def predict_emotions(self, X: np.ndarray) -> list[Emotion]:
        return [EMOTIONS[int(c)] for c in self.predict(X)]


def hyperparameters_for(kind: str, overrides: dict | None = None) -> dict:
    if kind not in KINDS:
        raise ModelError(f"unknown learner kind {kind!r}; expected one of {', '.join(KINDS)}")
    hp = dict(DEFAULT_HYPERPARAMETERS[kind])
    for k, v in (overrides or {}).items():
        if k not in hp:
            raise ModelError(f"{kind} has no hyperparameter {k!r}")
        hp[k] = v
    return hp


def train(kind: str, data: Dataset, hyperparameters: dict | None = None, seed: int = 0) -> EmotionModel:
    hp = hyperparameters_for(kind, hyperparameters)
    if len(data) == 0:
        raise DatasetError("cannot train on an empty set")
    X, y = data.X, data.y
    if kind == "decision_tree":
        est = DecisionTree(hp["max_depth"], hp["min_leaf"]).fit(X, y)
    elif kind == "random_forest":
        est = RandomForest(hp["n_trees"], hp["max_depth"], hp["min_leaf"], hp["max_features"],
                           hp["bootstrap"], hp["n_jobs"], seed).fit(X, y)
    elif kind == "naive_bayes":
        est = NaiveBayes(hp["var_floor"]).fit(X, y)
    else:
        est = KNearest(hp["k"]).fit(X, y)
    return EmotionModel(kind, data.dimension, seed, hp, est)


def model_to_dict(model: EmotionModel) -> dict:
    est = model.estimator
    if model.kind == "decision_tree":
        params = est.to_dict()
    elif model.kind == "random_forest":
        params = {"trees": [t.to_dict() for t in est.trees]}
    elif model.kind == "naive_bayes":
        params = {"classes": est.classes.tolist(), "log_prior": est.log_prior.tolist(),
                  "mean": est.mean.tolist(), "var": est.var.tolist()}
    else:
        params = {"X": est.X.tolist(), "y": est.y.tolist()}
    return {"format_version": MODEL_FORMAT_VERSION, "kind": model.kind, "dimension": model.dimension,
            "seed": model.seed, "hyperparameters": model.hyperparameters, "params": params}


def model_from_dict(d: dict) -> EmotionModel:
    if d.get("format_version") != MODEL_FORMAT_VERSION:
        raise ModelError(f"unsupported model format_version {d.get('format_version')!r}")
    kind, hp, p = d["kind"], d["hyperparameters"], d["params"]
    if kind == "decision_tree":
        est = DecisionTree.from_dict(p, hp["max_depth"], hp["min_leaf"])
    elif kind == "random_forest":
        est = RandomForest(hp["n_trees"], hp["max_depth"], hp["min_leaf"], hp["max_features"],
                           hp["bootstrap"], hp["n_jobs"], d["seed"])
        est.trees = [DecisionTree.from_dict(t, hp["max_depth"], hp["min_leaf"]) for t in p["trees"]]
    elif kind == "naive_bayes":
        est = NaiveBayes(hp["var_floor"])
        est.classes = np.array(p["classes"], dtype=np.intp)
        est.log_prior = np.array(p["log_prior"], dtype=np.float64)
        est.mean = np.array(p["mean"], dtype=np.float64)
        est.var = np.array(p["var"], dtype=np.float64)
    elif kind == "knn":
        est = KNearest(hp["k"]).fit(np.array(p["X"], dtype=np.float64), np.array(p["y"], dtype=np.intp))
    else:
        raise ModelError(f"unknown learner kind {kind!r}")
    return EmotionModel(kind, int(d["dimension"]), int(d["seed"]), hp, est)


def save_model(model: EmotionModel) -> str:
    return json.dumps(model_to_dict(model)) + "\n"


def load_model(source: bytes | str) -> EmotionModel:
    try:
        return model_from_dict(json.loads(source))
    except (KeyError, TypeError, json.JSONDecodeError) as exc:
        raise ModelError(f"malformed model file: {exc}") from None
