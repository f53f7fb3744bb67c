"""Kernel backend selection.

Hot numeric kernels ship in two flavors: numba @njit scalar loops and
vectorized pure-numpy twins. The env var INFOLOSS_NUMBA picks the path:

    INFOLOSS_NUMBA=0   force the pure-numpy fallback
    INFOLOSS_NUMBA=1   require numba (ImportError if missing)
    unset / auto       use numba when importable, numpy otherwise

``benchmarks/bench_backends.py`` compares the two paths.
"""

import os

_FLAG = os.environ.get("INFOLOSS_NUMBA", "auto").strip().lower()

if _FLAG in ("0", "false", "off", "no"):
    NUMBA_ENABLED = False
    njit = None
elif _FLAG in ("1", "true", "on", "yes"):
    from numba import njit  # hard requirement when explicitly requested

    NUMBA_ENABLED = True
else:
    try:
        from numba import njit

        NUMBA_ENABLED = True
    except ImportError:
        NUMBA_ENABLED = False
        njit = None


def jit(func):
    """Apply @njit(cache=True) when the numba path is active, else no-op."""
    if NUMBA_ENABLED:
        return njit(cache=True)(func)
    return func
