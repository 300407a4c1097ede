"""Numba availability switch.

Set ``NCGDIST_DISABLE_NUMBA=1`` to force the pure-numpy kernels (useful for
debugging and for the benchmark comparison).
"""
import os

ENV_FLAG = "NCGDIST_DISABLE_NUMBA"


def _numba_requested() -> bool:
    return os.environ.get(ENV_FLAG, "").strip().lower() not in {"1", "true", "yes", "on"}


try:
    import numba as _numba
    HAVE_NUMBA = True
except ImportError:  # pragma: no cover - numba is a hard dependency, kept for robustness
    _numba = None
    HAVE_NUMBA = False

USE_NUMBA = HAVE_NUMBA and _numba_requested()


def njit(*args, **kwargs):
    """``numba.njit`` when available, otherwise the identity decorator."""
    if HAVE_NUMBA:
        return _numba.njit(*args, **kwargs)
    if len(args) == 1 and callable(args[0]) and not kwargs:
        return args[0]
    return lambda fn: fn
