"""Kernel backend selection.

Hot numeric kernels exist twice: a numba ``@njit`` version and a pure
numpy/python fallback.  The environment variable ``PLANKLINE_BACKEND``
picks one:

* ``numba`` (default when numba imports): JIT-compiled kernels.
* ``numpy``: vectorized / pure-python fallbacks, no JIT.

The two backends must produce identical results; ``tests/test_kernels.py``
checks parity and ``benchmarks/bench_kernels.py`` compares speed.
"""

from __future__ import annotations

import os

_env = os.environ.get("PLANKLINE_BACKEND", "").strip().lower()

if _env not in ("", "numba", "numpy"):
    raise RuntimeError(
        f"PLANKLINE_BACKEND={_env!r} not understood (use 'numba' or 'numpy')"
    )

if _env == "numpy":
    HAVE_NUMBA = False
else:
    try:
        import numba  # noqa: F401

        HAVE_NUMBA = True
    except ImportError:
        if _env == "numba":
            raise
        HAVE_NUMBA = False

USING_NUMBA = HAVE_NUMBA


def backend_name() -> str:
    return "numba" if USING_NUMBA else "numpy"


def set_num_threads(k: int) -> None:
    """Cap worker threads used by the JIT kernels (no-op on the numpy path)."""
    if USING_NUMBA:
        import numba

        numba.set_num_threads(max(1, min(k, numba.config.NUMBA_NUM_THREADS)))
