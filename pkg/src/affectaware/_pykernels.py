"""NumPy implementations of the hot loops.

Every quantity is computed with the same floating-point operation order as
the compiled kernels in ``_kernels.pyx``, so both backends give identical
results bit for bit.
"""
from __future__ import annotations

import numpy as np

_COL_CHUNK = 32


def scan_splits(xs, ys, n_classes, min_leaf, parent_score):
    """Best Gini split over presorted columns.

    ``xs`` and ``ys`` are ``(k, m)``: row ``j`` holds one candidate feature's
    values in ascending order and the labels in that same order. A split at
    position ``p`` puts the first ``p + 1`` samples on the left.

    Returns ``(col, pos, score)`` with ``col == -1`` when no split beats
    ``parent_score``. Score is ``sum(L_c^2)/n_L + sum(R_c^2)/n_R``. Larger
    is better. Ties go to the first column, then the first position.
    """
    k, m = xs.shape
    if m < 2 * min_leaf or m < 2:
        return -1, -1, -np.inf
    n_left = np.arange(1, m, dtype=np.int64)
    n_right = m - n_left
    size_ok = (n_left >= min_leaf) & (n_right >= min_leaf)
    classes = np.arange(n_classes)

    best_col, best_pos, best = -1, -1, parent_score
    for lo in range(0, k, _COL_CHUNK):
        hi = min(k, lo + _COL_CHUNK)
        onehot = (ys[lo:hi, :, None] == classes).astype(np.int64)
        left = np.cumsum(onehot, axis=1)[:, :-1, :]
        total = left[:, -1, :] + onehot[:, -1, :]
        right = total[:, None, :] - left
        sl = (left * left).sum(axis=2)
        sr = (right * right).sum(axis=2)
        score = sl.astype(np.float64) / n_left.astype(np.float64) \
            + sr.astype(np.float64) / n_right.astype(np.float64)
        valid = (xs[lo:hi, :-1] < xs[lo:hi, 1:]) & size_ok
        score[~valid] = -np.inf
        flat = int(np.argmax(score))
        c, p = divmod(flat, m - 1)
        if score[c, p] > best:
            best = float(score[c, p])
            best_col, best_pos = lo + c, p
    if best_col < 0:
        return -1, -1, -np.inf
    return best_col, best_pos, best


def tree_apply(X, feature, threshold, left, right):
    """Leaf index reached by each row of ``X``."""
    node = np.zeros(X.shape[0], dtype=np.intp)
    rows = np.arange(X.shape[0])
    while True:
        f = feature[node]
        internal = f >= 0
        if not internal.any():
            return node
        r = rows[internal]
        n = node[internal]
        go_left = X[r, f[internal]] <= threshold[n]
        node[internal] = np.where(go_left, left[n], right[n])


def sq_distances(X_train, q):
    d = np.zeros(X_train.shape[0], dtype=np.float64)
    for j in range(X_train.shape[1]):
        diff = X_train[:, j] - q[j]
        d += diff * diff
    return d


def knn_predict(X_train, y_train, X_query, k, n_classes):
    """Majority label of the ``k`` nearest training rows.

    Neighbours are ranked by (distance, label, row). Vote ties go to the
    lowest label.
    """
    n = X_train.shape[0]
    k = min(k, n)
    out = np.empty(X_query.shape[0], dtype=np.intp)
    rows = np.arange(n)
    for i in range(X_query.shape[0]):
        d = sq_distances(X_train, X_query[i])
        nearest = np.lexsort((rows, y_train, d))[:k]
        out[i] = int(np.argmax(np.bincount(y_train[nearest], minlength=n_classes)))
    return out
