"""Numba switch for the hot loops.

Set ``CHBERGMAN_DISABLE_NUMBA=1`` in the environment before import to force
the pure-numpy paths. The flag is read once, at import time.
"""
from __future__ import annotations

import logging
import os

_FLAG = "CHBERGMAN_DISABLE_NUMBA"


def _numba_requested() -> bool:
    return os.environ.get(_FLAG, "").strip().lower() not in ("1", "true", "yes", "on")


try:
    if not _numba_requested():
        raise ImportError("disabled by environment")
    import numba

    logging.getLogger("numba").setLevel(logging.WARNING)
    # the bundled TBB is often too old; skip it instead of warning on every launch
    numba.config.THREADING_LAYER_PRIORITY = ["omp", "workqueue", "tbb"]
    HAVE_NUMBA = True
except ImportError:
    numba = None
    HAVE_NUMBA = False


def njit(*args, **kwargs):
    """``numba.njit`` when available, otherwise the identity decorator."""
    if HAVE_NUMBA:
        return numba.njit(*args, **kwargs)
    if len(args) == 1 and callable(args[0]) and not kwargs:
        return args[0]
    return lambda f: f


def backend() -> str:
    return "numba" if HAVE_NUMBA else "numpy"
