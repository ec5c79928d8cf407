"""Optional parallelism cap via the DIRAC_BAG_THREADS environment variable.

BLAS libraries read their thread-count variables when they are first
loaded, so this must run before numpy is imported; the package __init__
calls it first thing.  Explicit user settings are never overridden.
"""

import os

_VARS = ("OMP_NUM_THREADS", "OPENBLAS_NUM_THREADS", "MKL_NUM_THREADS",
         "NUMEXPR_NUM_THREADS")


def apply_thread_cap() -> None:
    raw = os.environ.get("DIRAC_BAG_THREADS")
    if not raw:
        return
    try:
        n = int(raw)
    except ValueError:
        raise ValueError(f"DIRAC_BAG_THREADS must be an integer, got {raw!r}")
    if n < 1:
        raise ValueError(f"DIRAC_BAG_THREADS must be >= 1, got {n}")
    for var in _VARS:
        os.environ.setdefault(var, str(n))
