"""Optional numba acceleration.

Set ``MLSPECTRA_DISABLE_NUMBA=1`` before import to force the pure-numpy
kernels, e.g. for debugging or on platforms without numba.
"""
import os

try:
    from numba import njit

    HAS_NUMBA = True
except ImportError:  # pragma: no cover
    HAS_NUMBA = False

NUMBA_DISABLED = os.environ.get("MLSPECTRA_DISABLE_NUMBA", "").strip().lower() in {
    "1",
    "true",
    "yes",
}
USE_NUMBA = HAS_NUMBA and not NUMBA_DISABLED


def optional_njit(*args, **kwargs):
    """``numba.njit`` when numba is usable, otherwise None."""

    def decorator(func):
        if HAS_NUMBA:
            return njit(*args, **kwargs)(func)
        return None

    return decorator
