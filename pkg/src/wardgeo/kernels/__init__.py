"""Agglomeration kernel backends.

The compiled Cython kernels are used when the extension built; otherwise the
pure-numpy fallback takes over transparently.  Set ``WARDGEO_KERNEL=python``
or ``WARDGEO_KERNEL=cython`` to force a backend (the latter raises if the
extension is missing).  ``benchmarks/bench_kernels.py`` compares the two.
"""

import os

_requested = os.environ.get("WARDGEO_KERNEL", "auto").lower()

if _requested in ("cython", "compiled", "c"):
    from . import _agglo_cy as _impl
    BACKEND = "cython"
elif _requested in ("python", "pure", "py"):
    from . import _agglo_py as _impl
    BACKEND = "python"
elif _requested == "auto":
    try:
        from . import _agglo_cy as _impl
        BACKEND = "cython"
    except ImportError:
        from . import _agglo_py as _impl
        BACKEND = "python"
else:
    raise ImportError(
        f"WARDGEO_KERNEL={_requested!r} not recognized (use auto, cython, or python)"
    )

naive_merge = _impl.naive_merge
nn_chain_merge = _impl.nn_chain_merge

__all__ = ["naive_merge", "nn_chain_merge", "BACKEND"]
