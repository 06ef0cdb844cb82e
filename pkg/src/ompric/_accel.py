"""Backend switch for the hot kernels.

Kernels are written once and decorated with :func:`jit`. When numba is
importable and ``OMPRIC_DISABLE_NUMBA`` is unset (or ``0``), they are
compiled with ``numba.njit``; otherwise they run as plain numpy code and the
callers pick the vectorized numpy paths where one exists.
"""

import os

_flag = os.environ.get("OMPRIC_DISABLE_NUMBA", "").strip().lower()
_disabled = _flag not in ("", "0", "false", "no")

try:
    if _disabled:
        raise ImportError("numba disabled by OMPRIC_DISABLE_NUMBA")
    import numba
except ImportError:
    numba = None

NUMBA_ENABLED = numba is not None
BACKEND = "numba" if NUMBA_ENABLED else "numpy"


def jit(func):
    """Compile ``func`` in nopython mode when numba is active."""
    if NUMBA_ENABLED:
        return numba.njit(cache=True)(func)
    return func


def python_impl(func):
    """Return the uncompiled Python body of a kernel."""
    return getattr(func, "py_func", func)
