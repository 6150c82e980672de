"""Batch walk kernels, backend-dispatched.

``plankline._backend`` selects between the numba JIT implementation
(:mod:`plankline.kernels.jit`) and the vectorized numpy fallback
(:mod:`plankline.kernels.npy`).  Both expose the same functions with
identical exact-integer semantics.

Scaled-line convention: rows (a, b, c, tilt, shift) describe a*X + b*Y = c
on the [0, n]^2 integer-rescaled board (see geometry.Line.scaled_coeffs).
int64 only; callers keep coefficients small enough that no product
overflows.
"""

from __future__ import annotations

import numpy as np

from .._backend import USING_NUMBA

if USING_NUMBA:
    from . import jit as _impl
else:
    from . import npy as _impl

from .npy import class_b_lines, iter_candidate_blocks  # backend-independent

pierce_stats = _impl.pierce_stats
pierce_ranges = _impl.pierce_ranges
hit_ranges = _impl.hit_ranges
pierce_sums = _impl.pierce_sums
hit_sums = _impl.hit_sums
scan_separation = _impl.scan_separation
scan_max_pierce = _impl.scan_max_pierce
scan_max_hit = _impl.scan_max_hit
simplex_iterate = _impl.simplex_iterate
density_line_integrals = _impl.density_line_integrals
accumulate_coverage = _impl.accumulate_coverage


def ranges_to_cells(jlo_row: np.ndarray, jhi_row: np.ndarray, transposed: bool):
    """Expand one line's per-column ranges into sorted (i, j) cells."""
    cells = []
    for col in range(len(jlo_row)):
        lo = int(jlo_row[col])
        hi = int(jhi_row[col])
        if lo > hi:
            continue
        if transposed:
            cells.extend((j, col + 1) for j in range(lo, hi + 1))
        else:
            cells.extend((col + 1, j) for j in range(lo, hi + 1))
    cells.sort()
    return cells


MAX_COEFF_BITS = 40


def int64_walk_safe(n: int, max_abs_coeff: int) -> bool:
    """True when the int64 kernels cannot overflow for these magnitudes.

    The walk forms p = c - a*x (|x| <= n) and compares p against j*b, so the
    working magnitude is about max|coeff| * (n + 1).
    """
    return max_abs_coeff * (n + 1) < 2**60
