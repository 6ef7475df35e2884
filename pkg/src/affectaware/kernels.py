"""Backend selection for the numeric kernels.

The compiled extension is used when it imports; otherwise the NumPy
fallback is used. Setting ``AFFECTAWARE_KERNELS=python`` forces the
fallback at import. ``use_backend`` switches explicitly (tests and the
benchmark exercise both).
"""
from __future__ import annotations

import os
from contextlib import contextmanager

import numpy as np

from . import _pykernels

try:
    from . import _kernels as _compiled
except ImportError:  # extension not built
    _compiled = None

_BACKENDS = {"python": _pykernels}
if _compiled is not None:
    _BACKENDS["compiled"] = _compiled

_active = _BACKENDS.get(os.environ.get("AFFECTAWARE_KERNELS", "compiled"), _pykernels)


def available_backends() -> tuple[str, ...]:
    return tuple(_BACKENDS)


def backend() -> str:
    return "compiled" if _active is _compiled else "python"


def use_backend(name: str) -> None:
    global _active
    try:
        _active = _BACKENDS[name]
    except KeyError:
        raise ValueError(f"backend {name!r} unavailable; have {available_backends()}") from None


@contextmanager
def using(name: str):
    prev = backend()
    use_backend(name)
    try:
        yield
    finally:
        use_backend(prev)


def scan_splits(xs, ys, n_classes, min_leaf, parent_score):
    return _active.scan_splits(np.ascontiguousarray(xs, dtype=np.float64),
                               np.ascontiguousarray(ys, dtype=np.intp),
                               int(n_classes), int(min_leaf), float(parent_score))


def tree_apply(X, feature, threshold, left, right):
    return _active.tree_apply(np.ascontiguousarray(X, dtype=np.float64), feature, threshold, left, right)


def knn_predict(X_train, y_train, X_query, k, n_classes):
    return _active.knn_predict(np.ascontiguousarray(X_train, dtype=np.float64),
                               np.ascontiguousarray(y_train, dtype=np.intp),
                               np.ascontiguousarray(X_query, dtype=np.float64),
                               int(k), int(n_classes))
