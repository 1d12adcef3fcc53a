"""Kernel backend selection: numba JIT by default, pure numpy on request.

Set NEUROMIME_NUMBA=0 (or "false"/"no") before import to force the pure-numpy
fallback path.  The flag is read once at import time because numba compiles
functions at decoration time.  ``benchmarks/bench_backends.py`` times the same
kernels under both settings.
"""

import os

__all__ = ["NUMBA_ENABLED", "jit_kernel"]


def _numba_requested() -> bool:
    flag = os.environ.get("NEUROMIME_NUMBA", "1").strip().lower()
    return flag not in ("0", "false", "no", "off")


NUMBA_ENABLED = False
if _numba_requested():
    try:
        from numba import njit as _njit

        NUMBA_ENABLED = True
    except ImportError:
        NUMBA_ENABLED = False

if NUMBA_ENABLED:

    def jit_kernel(func):
        """Compile a hot loop with numba (nopython, cached)."""
        return _njit(cache=True)(func)

else:

    def jit_kernel(func):
        """Numba disabled or unavailable: run the kernel as plain Python/numpy."""
        return func
