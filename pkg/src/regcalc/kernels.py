"""Backend selection for the hot loops.

The Cython extension ``_kernels`` is used when it imports; otherwise, or when
``REGCALC_PURE_PYTHON`` is set to a non-empty value, ``_kernels_py`` is used.
Both expose the same functions.
"""
from __future__ import annotations

import os
from functools import lru_cache

import numpy as np

from . import _kernels_py

try:
    from . import _kernels as _compiled
except ImportError:  # extension not built
    _compiled = None

if _compiled is not None and not os.environ.get("REGCALC_PURE_PYTHON"):
    impl = _compiled
    BACKEND = "compiled"
else:
    impl = _kernels_py
    BACKEND = "python"


def available_backends() -> dict:
    out = {"python": _kernels_py}
    if _compiled is not None:
        out["compiled"] = _compiled
    return out


bell = _kernels_py.bell


def canonical_key_matrix(rgs: np.ndarray, nblocks: np.ndarray, sizes: np.ndarray) -> np.ndarray:
    """Encode each partition as blocks (1-based, ascending) each followed by 0.

    Lexicographic order on the encoding equals tuple-of-tuples order on
    the block lists, so a lexsort on it reproduces the canonical order.
    """
    P, n = rgs.shape
    rgs = rgs.astype(np.int64)
    # start offset of each block inside the encoding: sizes of earlier blocks + separators
    starts = np.zeros_like(sizes)
    starts[:, 1:] = np.cumsum(sizes[:, :-1] + 1, axis=1)
    starts = np.where(np.arange(n)[None, :] < nblocks[:, None], starts, 0)
    key = np.zeros((P, 2 * n), dtype=np.int64)
    seen = np.zeros((P, n), dtype=np.int64)
    rows = np.arange(P)
    for s in range(n):
        lab = rgs[:, s]
        key[rows, starts[rows, lab] + seen[rows, lab]] = s + 1
        seen[rows, lab] += 1
    return key


@lru_cache(maxsize=16)
def canonical_partitions(n: int):
    """(rgs, nblocks, sizes) for all partitions of [n] in canonical order.

    Canonical order: by block count, then by the list of blocks (each block
    ascending, blocks ordered by least element) compared as tuples.
    Arrays are read-only.
    """
    rgs = impl.rgs_partitions(n)
    nblocks, sizes = impl.block_profiles(rgs)
    key = canonical_key_matrix(rgs, nblocks, sizes)
    order = np.lexsort(tuple(key[:, c] for c in range(key.shape[1] - 1, -1, -1)) + (nblocks,))
    out = (rgs[order], np.asarray(nblocks)[order], np.asarray(sizes)[order])
    for a in out:
        a.setflags(write=False)
    return out
