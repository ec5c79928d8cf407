"""Propagator backend selection.

The hot kernel (stepping the 2x2 exponential propagator across the box)
exists twice: a Cython extension (``diracbag._kernel``) and the pure
NumPy reference (``diracbag._magnus``).  The extension is picked at
import when it is available; ``DIRAC_BAG_BACKEND=python`` or
``=compiled`` forces the choice.  Both implement the same arithmetic, so
results agree to rounding; ``python -m diracbag.benchmark`` compares
their speed.
"""

from __future__ import annotations

import os

import numpy as np

from . import _magnus

__all__ = ["propagate_batch", "propagate_trace", "suggested_steps", "backend_name"]

_kernel = None
_choice = os.environ.get("DIRAC_BAG_BACKEND", "auto").strip().lower()
if _choice not in ("auto", "python", "compiled"):
    raise ValueError(f"DIRAC_BAG_BACKEND must be auto|python|compiled, got {_choice!r}")
if _choice in ("auto", "compiled"):
    try:
        from . import _kernel  # type: ignore[no-redef]
    except ImportError:
        _kernel = None
        if _choice == "compiled":
            raise ImportError(
                "DIRAC_BAG_BACKEND=compiled but the diracbag._kernel extension "
                "is not built (run: pip install -e . or python setup.py build_ext --inplace)")

suggested_steps = _magnus.suggested_steps


def backend_name() -> str:
    return "compiled" if _kernel is not None else "python"


def propagate_batch(eps, mass, lam, x0, x1, u0, v0, n_steps):
    """Final (u, v) after n_steps uniform steps, vectorised over eps."""
    eps = np.ascontiguousarray(eps, dtype=float)
    if _kernel is not None and eps.ndim == 1:
        u = np.empty_like(eps)
        v = np.empty_like(eps)
        _kernel.propagate_batch(eps, float(mass), float(lam), float(x0), float(x1),
                                float(u0), float(v0), int(n_steps), u, v)
        return u, v
    return _magnus.propagate(eps, mass, lam, x0, x1, u0, v0, n_steps)


def propagate_trace(eps, mass, lam, x0, x1, u0, v0, n_steps):
    """Per-step state trace for a single energy: (xs, us, vs)."""
    if _kernel is not None:
        xs = x0 + (x1 - x0) * np.arange(n_steps + 1) / n_steps
        us = np.empty(n_steps + 1)
        vs = np.empty(n_steps + 1)
        _kernel.propagate_trace(float(eps), float(mass), float(lam), float(x0),
                                float(x1), float(u0), float(v0), int(n_steps), us, vs)
        return xs, us, vs
    return _magnus.propagate_trace(eps, mass, lam, x0, x1, u0, v0, n_steps)
