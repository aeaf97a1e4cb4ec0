"""numba switch: kernels are plain numpy-compatible python that numba can
compile. Set ``CATFLOW_DISABLE_NUMBA=1`` to run them interpreted."""

import os

DISABLE_ENV = "CATFLOW_DISABLE_NUMBA"


def _wanted():
    return os.environ.get(DISABLE_ENV, "0").strip().lower() not in ("1", "true", "yes")


try:
    import numba as _numba
except ImportError:  # pragma: no cover - numba is a declared dependency
    _numba = None

NUMBA_ENABLED = _numba is not None and _wanted()


def njit(func):
    """``numba.njit(nogil=True)`` when enabled, identity otherwise."""
    if NUMBA_ENABLED:
        return _numba.njit(nogil=True, cache=True)(func)
    return func


def python_version(func):
    """Interpreted body of a kernel, whichever mode is active."""
    return getattr(func, "py_func", func)
