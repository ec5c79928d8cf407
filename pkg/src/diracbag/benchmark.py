"""Backend benchmark: compiled kernel vs pure-NumPy reference.

Run as ``python -m diracbag.benchmark``.  Times the mismatch-scan and the
trace workloads that dominate the eigensolver, checks that both backends
agree to rounding, and reports the speedup.
"""

from __future__ import annotations

import time

import numpy as np

from . import _magnus, backend
from .bagmodel import BagConfig
from .shooting import find_levels


def _time(fn, repeat=3):
    best = float("inf")
    for _ in range(repeat):
        t0 = time.perf_counter()
        fn()
        best = min(best, time.perf_counter() - t0)
    return best


def run(report=print) -> dict:
    try:
        from . import _kernel
    except ImportError:
        _kernel = None

    cfg = BagConfig(a=1.0, mass=1.0, lam=1.0)
    eps = np.linspace(-8.0, 8.0, 256)
    n_steps = _magnus.suggested_steps(cfg.a, cfg.mass, cfg.lam, 8.0)
    results = {"batch_lanes": len(eps), "n_steps": n_steps,
               "active_backend": backend.backend_name()}

    def py_batch():
        return _magnus.propagate(eps, cfg.mass, cfg.lam, -cfg.a, cfg.a,
                                 1.0, 1.0, n_steps)

    t_py = _time(py_batch)
    results["python_batch_s"] = t_py
    report(f"mismatch batch ({len(eps)} lanes x {n_steps} steps): python {t_py*1e3:8.1f} ms")

    if _kernel is not None:
        out_u = np.empty_like(eps)
        out_v = np.empty_like(eps)

        def c_batch():
            _kernel.propagate_batch(eps, cfg.mass, cfg.lam, -cfg.a, cfg.a,
                                    1.0, 1.0, n_steps, out_u, out_v)
            return out_u, out_v

        t_c = _time(c_batch)
        u_py, v_py = py_batch()
        c_batch()
        agree = max(np.max(np.abs(out_u - u_py)), np.max(np.abs(out_v - v_py)))
        results["compiled_batch_s"] = t_c
        results["batch_speedup"] = t_py / t_c
        results["batch_agreement"] = float(agree)
        report(f"                                             compiled {t_c*1e3:8.1f} ms"
               f"  (x{t_py/t_c:.1f}, max diff {agree:.1e})")
    else:
        report("compiled kernel not built; python backend only "
               "(build with: python setup.py build_ext --inplace)")

    def levels():
        return find_levels(cfg, (-8.0, 8.0), tol=1.0e-12)

    t_lv = _time(levels, repeat=1)
    results["find_levels_s"] = t_lv
    report(f"find_levels (m=1, lam=1, window (-8,8)) via {backend.backend_name()}: {t_lv:.2f} s")
    return results


if __name__ == "__main__":
    run()
