"""Kernel selection: compiled extension when built, NumPy reference otherwise.

Set CHROMAHQD_PURE_PYTHON=1 to force the reference implementations.  The
compiled kernels have fixed buffer limits; oversized problems silently use
the reference path, so the public functions here work at any size.
"""

import os

import numpy as np

from . import _pyref

if os.environ.get("CHROMAHQD_PURE_PYTHON"):
    _core = None
else:
    try:
        from . import _core
    except ImportError:
        _core = None

BACKEND = "compiled" if _core is not None else "python"


def count_compatible_masks(n, tails, heads, interior, higher, lo, hi):
    if (
        _core is not None
        and n <= _core.MAX_MASK_VERTICES
        and len(tails) <= _core.MAX_MASK_EDGES
    ):
        return _core.count_compatible_masks(
            n,
            np.ascontiguousarray(tails, dtype=np.int32),
            np.ascontiguousarray(heads, dtype=np.int32),
            np.ascontiguousarray(interior, dtype=np.uint8),
            np.ascontiguousarray(higher, dtype=np.uint64),
            lo,
            hi,
        )
    return _pyref.count_compatible_masks(n, tails, heads, interior, higher, lo, hi)


def integrand_batch(n_int, tails, heads, bvals, conduct):
    if (
        _core is not None
        and n_int <= _core.MAX_INTERIOR
        and len(bvals) <= _core.MAX_TOTAL
        and conduct.shape[1] <= _core.MAX_EDGES
    ):
        return _core.integrand_batch(
            n_int,
            np.ascontiguousarray(tails, dtype=np.int32),
            np.ascontiguousarray(heads, dtype=np.int32),
            np.ascontiguousarray(bvals, dtype=np.float64),
            np.ascontiguousarray(conduct, dtype=np.float64),
        )
    return _pyref.integrand_batch(n_int, tails, heads, bvals, conduct)
