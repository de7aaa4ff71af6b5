"""Kernel dispatch: numba-jitted fast path, pure-numpy fallback.

Set COARREST_NO_NUMBA=1 in the environment to force the numpy path. When
numba is absent or fails to import, the numpy path is selected silently.
Both backends implement the same contracts over CSR adjacency (int64
indptr/indices/weights, neighbor lists sorted, no self entries, both
directions of every undirected edge present) and must return identical
values, which tests/test_kernels.py enforces.
"""

from __future__ import annotations

import os


def _numba_disabled() -> bool:
    flag = os.environ.get("COARREST_NO_NUMBA", "").strip().lower()
    return flag not in ("", "0", "false", "no")


if _numba_disabled():
    from . import numpy_backend as _impl

    BACKEND = "numpy"
else:
    try:
        from . import numba_backend as _impl

        BACKEND = "numba"
    except ImportError:
        from . import numpy_backend as _impl

        BACKEND = "numpy"

seed_decomposition = _impl.seed_decomposition
threshold_cascade = _impl.threshold_cascade
core_numbers = _impl.core_numbers
count_marked_neighbors = _impl.count_marked_neighbors
louvain_local_pass = _impl.louvain_local_pass
modularity_value = _impl.modularity_value

__all__ = [
    "BACKEND",
    "core_numbers",
    "count_marked_neighbors",
    "louvain_local_pass",
    "modularity_value",
    "seed_decomposition",
    "threshold_cascade",
]
