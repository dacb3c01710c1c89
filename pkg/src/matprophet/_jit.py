"""Optional numba acceleration.

Kernels are written in nopython-compatible style so the exact same code runs
either jitted or as plain interpreted numpy. Set MATPROPHET_NO_NUMBA=1 to
force the interpreted path; it is also taken automatically when numba is not
importable.
"""

import os

__all__ = ["jit_kernel", "NUMBA_ENABLED", "BACKEND"]


def _numba_wanted() -> bool:
    flag = os.environ.get("MATPROPHET_NO_NUMBA", "").strip().lower()
    return flag not in ("1", "true", "yes", "on")


NUMBA_ENABLED = False
if _numba_wanted():
    try:
        from numba import njit as _njit
        NUMBA_ENABLED = True
    except ImportError:
        NUMBA_ENABLED = False

BACKEND = "numba" if NUMBA_ENABLED else "python"

if NUMBA_ENABLED:
    def jit_kernel(func):
        return _njit(cache=True)(func)
else:
    def jit_kernel(func):
        return func
