"""Compare the compiled and pure-Python kernel backends.

Usage: python3 benchmarks/bench_kernels.py [--repeat N] [--samples N] [--dim D]
"""
from __future__ import annotations

import argparse
import time

import numpy as np

from affectaware import kernels
from affectaware.emotion.dataset import gaussian_blobs, split
from affectaware.emotion.learners import DecisionTree, train


def best_of(fn, repeat: int) -> float:
    times = []
    for _ in range(repeat):
        t0 = time.perf_counter()
        fn()
        times.append(time.perf_counter() - t0)
    return min(times)


def cases(n_per_class: int, dim: int):
    tr, te = split(gaussian_blobs(n_per_class, dim, seed=0), 0.8, seed=0)
    order = np.argsort(tr.X, axis=0, kind="stable")
    xs = np.take_along_axis(tr.X, order, axis=0).T.copy()
    ys = tr.y[order].T.copy()
    tree = DecisionTree().fit(tr.X, tr.y)
    return {
        "scan_splits (root node)": lambda: kernels.scan_splits(xs, ys, 7, 2, 0.0),
        "tree_apply": lambda: kernels.tree_apply(te.X, tree.feature, tree.threshold, tree.left, tree.right),
        "knn_predict (k=5)": lambda: kernels.knn_predict(tr.X, tr.y, te.X, 5, 7),
        "decision tree fit": lambda: DecisionTree().fit(tr.X, tr.y),
        "random forest fit (25 trees)": lambda: train("random_forest", tr, {"n_trees": 25}),
    }


def main(argv=None) -> None:
    parser = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    parser.add_argument("--repeat", type=int, default=5)
    parser.add_argument("--samples", type=int, default=200, help="samples per class")
    parser.add_argument("--dim", type=int, default=16)
    args = parser.parse_args(argv)

    backends = kernels.available_backends()
    if "compiled" not in backends:
        print("compiled extension not built; only the python backend is available")
    results = {}
    for name in backends:
        with kernels.using(name):
            for label, fn in cases(args.samples, args.dim).items():
                results[(label, name)] = best_of(fn, args.repeat)

    labels = list(cases(args.samples, args.dim))
    print(f"{'kernel':<30}" + "".join(f"{b:>12}" for b in backends) + ("    speedup" if len(backends) > 1 else ""))
    for label in labels:
        row = f"{label:<30}" + "".join(f"{results[(label, b)] * 1e3:>10.2f}ms" for b in backends)
        if len(backends) > 1:
            row += f"{results[(label, 'python')] / results[(label, 'compiled')]:>10.1f}x"
        print(row)


if __name__ == "__main__":
    main()
