"""Optional numba acceleration.

Set ``PLEMBED_NO_NUMBA=1`` to force the pure numpy/scipy kernels, e.g. to
compare backends or to run where numba cannot compile.
"""
import os

_DISABLED = os.environ.get("PLEMBED_NO_NUMBA", "").strip().lower() in ("1", "true", "yes", "on")

try:
    if _DISABLED:
        raise ImportError("disabled by PLEMBED_NO_NUMBA")
    import numba as _numba

    HAVE_NUMBA = True
except ImportError:
    _numba = None
    HAVE_NUMBA = False

BACKEND = "numba" if HAVE_NUMBA else "numpy"


def njit(*args, **kwargs):
    """``numba.njit`` when available, otherwise a no-op decorator."""
    if HAVE_NUMBA:
        kwargs.setdefault("cache", True)
        return _numba.njit(*args, **kwargs)

    def wrapper(func):
        return func

    if len(args) == 1 and callable(args[0]) and not kwargs:
        return args[0]
    return wrapper
