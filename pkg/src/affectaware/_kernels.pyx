# cython: language_level=3, boundscheck=False, wraparound=False, cdivision=True, initializedcheck=False
"""Compiled counterparts of ``_pykernels``; same arithmetic order, same results."""
import numpy as np
cimport numpy as cnp
from libc.stdlib cimport malloc, free
from libc.math cimport INFINITY

cnp.import_array()

ctypedef cnp.int64_t i64
ctypedef cnp.intp_t intp


def scan_splits(const double[:, ::1] xs, const intp[:, ::1] ys, int n_classes,
                Py_ssize_t min_leaf, double parent_score):
    cdef Py_ssize_t k = xs.shape[0], m = xs.shape[1]
    cdef Py_ssize_t col, p, c, nl, nr
    cdef i64 sl, sr
    cdef i64 *total
    cdef i64 *lc
    cdef i64 *rc
    cdef double score, best = parent_score
    cdef Py_ssize_t best_col = -1, best_pos = -1
    if m < 2 * min_leaf or m < 2:
        return -1, -1, -np.inf
    total = <i64 *> malloc(n_classes * sizeof(i64))
    lc = <i64 *> malloc(n_classes * sizeof(i64))
    rc = <i64 *> malloc(n_classes * sizeof(i64))
    try:
        with nogil:
            for c in range(n_classes):
                total[c] = 0
            for p in range(m):
                total[ys[0, p]] += 1
            for col in range(k):
                sl = 0
                sr = 0
                for c in range(n_classes):
                    lc[c] = 0
                    rc[c] = total[c]
                    sr += total[c] * total[c]
                for p in range(m - 1):
                    c = ys[col, p]
                    sl += 2 * lc[c] + 1
                    lc[c] += 1
                    sr -= 2 * rc[c] - 1
                    rc[c] -= 1
                    nl = p + 1
                    nr = m - nl
                    if nl < min_leaf or nr < min_leaf:
                        continue
                    if not (xs[col, p] < xs[col, p + 1]):
                        continue
                    score = (<double> sl) / (<double> nl) + (<double> sr) / (<double> nr)
                    if score > best:
                        best = score
                        best_col = col
                        best_pos = p
    finally:
        free(total)
        free(lc)
        free(rc)
    if best_col < 0:
        return -1, -1, -np.inf
    return best_col, best_pos, best


def tree_apply(const double[:, ::1] X, const intp[::1] feature, const double[::1] threshold,
               const intp[::1] left, const intp[::1] right):
    cdef Py_ssize_t n = X.shape[0], i
    cdef intp node
    out = np.empty(n, dtype=np.intp)
    cdef intp[::1] o = out
    with nogil:
        for i in range(n):
            node = 0
            while feature[node] >= 0:
                if X[i, feature[node]] <= threshold[node]:
                    node = left[node]
                else:
                    node = right[node]
            o[i] = node
    return out


cdef inline bint _before(double da, intp la, Py_ssize_t ia,
                         double db, intp lb, Py_ssize_t ib) noexcept nogil:
    if da != db:
        return da < db
    if la != lb:
        return la < lb
    return ia < ib


def knn_predict(const double[:, ::1] X_train, const intp[::1] y_train,
                const double[:, ::1] X_query, Py_ssize_t k, int n_classes):
    cdef Py_ssize_t n = X_train.shape[0], dim = X_train.shape[1], nq = X_query.shape[0]
    cdef Py_ssize_t i, j, r, t, filled, best
    cdef double acc, diff
    if k > n:
        k = n
    out = np.empty(nq, dtype=np.intp)
    cdef intp[::1] o = out
    cdef double *bd = <double *> malloc(k * sizeof(double))
    cdef intp *bl = <intp *> malloc(k * sizeof(intp))
    cdef Py_ssize_t *bi = <Py_ssize_t *> malloc(k * sizeof(Py_ssize_t))
    cdef i64 *votes = <i64 *> malloc(n_classes * sizeof(i64))
    try:
        with nogil:
            for i in range(nq):
                filled = 0
                for r in range(n):
                    acc = 0.0
                    for j in range(dim):
                        diff = X_train[r, j] - X_query[i, j]
                        acc = acc + diff * diff
                    if filled == k and not _before(acc, y_train[r], r, bd[k - 1], bl[k - 1], bi[k - 1]):
                        continue
                    if filled < k:
                        filled += 1
                    t = filled - 1
                    while t > 0 and _before(acc, y_train[r], r, bd[t - 1], bl[t - 1], bi[t - 1]):
                        bd[t] = bd[t - 1]
                        bl[t] = bl[t - 1]
                        bi[t] = bi[t - 1]
                        t -= 1
                    bd[t] = acc
                    bl[t] = y_train[r]
                    bi[t] = r
                for t in range(n_classes):
                    votes[t] = 0
                for t in range(filled):
                    votes[bl[t]] += 1
                best = 0
                for t in range(1, n_classes):
                    if votes[t] > votes[best]:
                        best = t
                o[i] = best
    finally:
        free(bd)
        free(bl)
        free(bi)
        free(votes)
    return out
