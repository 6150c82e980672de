"""numba-compiled exact walk kernels.

All arithmetic is int64; decisions are exact integer sign tests, identical
to the arbitrary-precision walk in ``geometry``.  Callers guarantee that
coefficients are small enough that no product overflows (|c| + |a|*n and
weight sums must stay below 2^62).

A perturbed scaled line is (a, b, c, tilt, shift): the locus a*X + b*Y = c
on the [0, n]^2 board with the symbolic perturbation of geometry.py; the
delta-coefficient of the y-value at abscissa X is tilt*(2X - n).
"""

from __future__ import annotations

import numpy as np
from numba import get_num_threads, get_thread_id, njit, prange

NB_CACHE = True


@njit(cache=NB_CACHE, inline="always")
def _gcd(a: int, b: int) -> int:
    if a < 0:
        a = -a
    if b < 0:
        b = -b
    while b:
        a, b = b, a % b
    return a


@njit(cache=NB_CACHE, inline="always")
def _delta_sign(d1: int, s: int) -> int:
    if d1 > 0:
        return 1
    if d1 < 0:
        return -1
    if s > 0:
        return 1
    if s < 0:
        return -1
    return 0


@njit(cache=NB_CACHE, inline="always")
def _jmin_open(p: int, q: int, d1: int, s: int) -> int:
    fl = p // q
    rem = p - fl * q
    if rem == 0 and _delta_sign(d1, s) < 0:
        return fl
    return fl + 1


@njit(cache=NB_CACHE, inline="always")
def _jmax_open(p: int, q: int, d1: int, s: int) -> int:
    fl = p // q
    rem = p - fl * q
    if rem != 0:
        return fl + 1
    if _delta_sign(d1, s) > 0:
        return fl + 1
    return fl


@njit(cache=NB_CACHE, inline="always")
def _column_range(a, b, c, t, s, n, i):
    """(jlo, jhi) of pierced cells in column i for a walk-normalized line (b>0)."""
    xl = i - 1
    xr = i
    p_l = c - a * xl
    p_r = c - a * xr
    d_l = t * (2 * xl - n)
    d_r = t * (2 * xr - n)
    if p_l < p_r or (p_l == p_r and d_l <= d_r):
        p_lo, d_lo, p_hi, d_hi = p_l, d_l, p_r, d_r
    else:
        p_lo, d_lo, p_hi, d_hi = p_r, d_r, p_l, d_l
    jlo = _jmin_open(p_lo, b, d_lo, s)
    jhi = _jmax_open(p_hi, b, d_hi, s)
    if jlo < 1:
        jlo = 1
    if jhi > n:
        jhi = n
    return jlo, jhi


@njit(cache=NB_CACHE)
def _walk_ranges(a, b, c, t, s, n, jlo_out, jhi_out):
    """Fill per-column pierced ranges; returns 1 for a transposed (vertical) walk."""
    transposed = 0
    if b == 0:
        a, b, c = 0, a, c
        transposed = 1
    if b < 0:
        a, b, c = -a, -b, -c
    for i in range(1, n + 1):
        lo, hi = _column_range(a, b, c, t, s, n, i)
        jlo_out[i - 1] = lo
        jhi_out[i - 1] = hi
    return transposed


@njit(cache=NB_CACHE)
def _walk_count_stair(a, b, c, t, s, n):
    """(cell count, staircase flag) for one perturbed line.

    Staircase: along the line consecutive cells change one coordinate by 1;
    a diagonal jump is tolerated only where the line crosses a grid vertex
    exactly (only possible for unperturbed lines).
    """
    if b == 0:
        a, b, c = 0, a, c
    if b < 0:
        a, b, c = -a, -b, -c
    count = 0
    stair = 1
    prev_lo = -1
    prev_hi = -1
    prev_empty_after_start = 0
    ascending = a <= 0  # slope of the walked line is -a/b
    for i in range(1, n + 1):
        lo, hi = _column_range(a, b, c, t, s, n, i)
        if lo > hi:
            if count > 0:
                prev_empty_after_start = 1
            continue
        if prev_empty_after_start:
            stair = 0  # board crossing must be one contiguous column run
        count += hi - lo + 1
        if prev_lo >= 0:
            if ascending:
                if lo != prev_hi and lo != prev_hi + 1:
                    stair = 0
            else:
                if hi != prev_lo and hi != prev_lo - 1:
                    stair = 0
        prev_lo, prev_hi = lo, hi
    return count, stair


@njit(cache=NB_CACHE)
def _walk_sum(a, b, c, t, s, n, wnum):
    """Exact integer weight sum of the snake of one perturbed line."""
    if b == 0:
        a, b, c = 0, a, c
        total = 0
        for i in range(1, n + 1):
            lo, hi = _column_range(a, b, c, t, s, n, i)
            for j in range(lo, hi + 1):
                total += wnum[j - 1, i - 1]
        return total
    if b < 0:
        a, b, c = -a, -b, -c
    total = 0
    for i in range(1, n + 1):
        lo, hi = _column_range(a, b, c, t, s, n, i)
        for j in range(lo, hi + 1):
            total += wnum[i - 1, j - 1]
    return total


@njit(cache=NB_CACHE, inline="always")
def _hit_column_range(a, b, c, n, i):
    p_l = c - a * (i - 1)
    p_r = c - a * i
    if p_l > p_r:
        p_l, p_r = p_r, p_l
    jlo = -((-p_l) // b)
    jhi = p_r // b + 1
    if jlo < 1:
        jlo = 1
    if jhi > n:
        jhi = n
    return jlo, jhi


@njit(cache=NB_CACHE)
def _hit_count(a, b, c, n):
    if b == 0:
        a, b, c = 0, a, c
    if b < 0:
        a, b, c = -a, -b, -c
    count = 0
    for i in range(1, n + 1):
        lo, hi = _hit_column_range(a, b, c, n, i)
        if lo <= hi:
            count += hi - lo + 1
    return count


@njit(cache=NB_CACHE)
def _hit_sum(a, b, c, n, wnum):
    if b == 0:
        a, b, c = 0, a, c
        total = 0
        for i in range(1, n + 1):
            lo, hi = _hit_column_range(a, b, c, n, i)
            for j in range(lo, hi + 1):
                total += wnum[j - 1, i - 1]
        return total
    if b < 0:
        a, b, c = -a, -b, -c
    total = 0
    for i in range(1, n + 1):
        lo, hi = _hit_column_range(a, b, c, n, i)
        for j in range(lo, hi + 1):
            total += wnum[i - 1, j - 1]
    return total


# --- batch APIs ---------------------------------------------------------------


@njit(cache=NB_CACHE, parallel=True)
def pierce_stats(lines, n):
    m = lines.shape[0]
    counts = np.zeros(m, dtype=np.int64)
    stair = np.zeros(m, dtype=np.uint8)
    for k in prange(m):
        cnt, st = _walk_count_stair(
            lines[k, 0], lines[k, 1], lines[k, 2], lines[k, 3], lines[k, 4], n
        )
        counts[k] = cnt
        stair[k] = st
    return counts, stair


@njit(cache=NB_CACHE, parallel=True)
def pierce_ranges(lines, n):
    m = lines.shape[0]
    jlo = np.zeros((m, n), dtype=np.int64)
    jhi = np.zeros((m, n), dtype=np.int64)
    transposed = np.zeros(m, dtype=np.uint8)
    for k in prange(m):
        transposed[k] = _walk_ranges(
            lines[k, 0], lines[k, 1], lines[k, 2], lines[k, 3], lines[k, 4],
            n, jlo[k], jhi[k],
        )
    return jlo, jhi, transposed


@njit(cache=NB_CACHE, parallel=True)
def hit_ranges(lines, n):
    m = lines.shape[0]
    jlo = np.zeros((m, n), dtype=np.int64)
    jhi = np.zeros((m, n), dtype=np.int64)
    transposed = np.zeros(m, dtype=np.uint8)
    for k in prange(m):
        a, b, c = lines[k, 0], lines[k, 1], lines[k, 2]
        if b == 0:
            a, b, c = 0, a, c
            transposed[k] = 1
        if b < 0:
            a, b, c = -a, -b, -c
        for i in range(1, n + 1):
            lo, hi = _hit_column_range(a, b, c, n, i)
            jlo[k, i - 1] = lo
            jhi[k, i - 1] = hi
    return jlo, jhi, transposed


@njit(cache=NB_CACHE, parallel=True)
def pierce_sums(lines, n, wnum):
    m = lines.shape[0]
    out = np.zeros(m, dtype=np.int64)
    for k in prange(m):
        out[k] = _walk_sum(
            lines[k, 0], lines[k, 1], lines[k, 2], lines[k, 3], lines[k, 4], n, wnum
        )
    return out


@njit(cache=NB_CACHE, parallel=True)
def hit_sums(lines, n, wnum):
    m = lines.shape[0]
    out = np.zeros(m, dtype=np.int64)
    for k in prange(m):
        out[k] = _hit_sum(lines[k, 0], lines[k, 1], lines[k, 2], n, wnum)
    return out


# --- streaming candidate scans ------------------------------------------------
#
# Candidate enumeration is replicated here so that the big boards never
# materialize the O(n^4) family.  Vertex pairs are deduplicated by keeping
# only the pair made of the first and last lattice point on each line.


@njit(cache=NB_CACHE, inline="always")
def _pair_line(x1, y1, x2, y2):
    a = y2 - y1
    b = x1 - x2
    c = a * x1 + b * y1
    return a, b, c


@njit(cache=NB_CACHE, inline="always")
def _is_chain_end_pair(x1, y1, x2, y2, n):
    dx = x2 - x1
    dy = y2 - y1
    g = _gcd(dx, dy)
    px = dx // g
    py = dy // g
    if 0 <= x1 - px <= n and 0 <= y1 - py <= n:
        return False
    if 0 <= x2 + px <= n and 0 <= y2 + py <= n:
        return False
    return True


@njit(cache=NB_CACHE, inline="always")
def _lex_better(sum_a, line_a, sum_b, line_b):
    """True when (sum_a, line_a) beats (sum_b, line_b): larger sum, ties by
    lexicographically smaller line tuple (deterministic across thread counts)."""
    if sum_a != sum_b:
        return sum_a > sum_b
    for idx in range(5):
        if line_a[idx] != line_b[idx]:
            return line_a[idx] < line_b[idx]
    return False


@njit(cache=NB_CACHE)
def _class_b_lines(n):
    """Axis-parallel and slope +-1 base lines with pure shifts, plus inward
    board edges (the edge lines coincide with shifted axis lines)."""
    total = 2 * (2 * (n + 1) + (2 * n + 1) + (2 * n + 1))
    out = np.empty((total, 5), dtype=np.int64)
    pos = 0
    for k in range(n + 1):
        for s in (-1, 1):
            out[pos, 0], out[pos, 1], out[pos, 2], out[pos, 3], out[pos, 4] = 0, 1, k, 0, s
            pos += 1
            out[pos, 0], out[pos, 1], out[pos, 2], out[pos, 3], out[pos, 4] = 1, 0, k, 0, s
            pos += 1
    for k in range(-n, n + 1):
        for s in (-1, 1):
            out[pos, 0], out[pos, 1], out[pos, 2], out[pos, 3], out[pos, 4] = -1, 1, k, 0, s
            pos += 1
    for k in range(0, 2 * n + 1):
        for s in (-1, 1):
            out[pos, 0], out[pos, 1], out[pos, 2], out[pos, 3], out[pos, 4] = 1, 1, k, 0, s
            pos += 1
    return out


@njit(cache=NB_CACHE, parallel=True)
def scan_separation(n, wnum, den, cap):
    """Exact max of snake weight sums over all candidate lines.

    Returns (best_sum, best_line[5], violated_lines[(m,5)], violated_sums[m])
    where the violated collection holds, per thread, at most ``cap`` of the
    largest sums strictly greater than ``den`` (the scaled value of 1).
    """
    nv = (n + 1) * (n + 1)
    nthreads = get_num_threads()
    best_sum = np.full(nthreads, -1, dtype=np.int64)
    best_line = np.zeros((nthreads, 5), dtype=np.int64)
    coll = np.zeros((nthreads, cap, 6), dtype=np.int64)
    coll_cnt = np.zeros(nthreads, dtype=np.int64)

    half = (nv + 1) // 2
    for ii in prange(nv):
        tid = get_thread_id()
        # interleave the triangular outer loop so static prange chunks balance
        idx1 = 2 * ii if ii < half else 2 * (ii - half) + 1
        x1 = idx1 // (n + 1)
        y1 = idx1 % (n + 1)
        line = np.zeros(5, dtype=np.int64)
        for idx2 in range(idx1 + 1, nv):
            x2 = idx2 // (n + 1)
            y2 = idx2 % (n + 1)
            if not _is_chain_end_pair(x1, y1, x2, y2, n):
                continue
            a, b, c = _pair_line(x1, y1, x2, y2)
            for t in (-1, 1):
                for s in (-1, 1):
                    v = _walk_sum(a, b, c, t, s, n, wnum)
                    line[0], line[1], line[2], line[3], line[4] = a, b, c, t, s
                    if _lex_better(v, line, best_sum[tid], best_line[tid]):
                        best_sum[tid] = v
                        best_line[tid] = line
                    if v > den:
                        _collect(coll, coll_cnt, tid, cap, v, a, b, c, t, s)

    classb = _class_b_lines(n)
    line = np.zeros(5, dtype=np.int64)
    for k in range(classb.shape[0]):
        a, b, c, t, s = classb[k, 0], classb[k, 1], classb[k, 2], classb[k, 3], classb[k, 4]
        v = _walk_sum(a, b, c, t, s, n, wnum)
        line[0], line[1], line[2], line[3], line[4] = a, b, c, t, s
        if _lex_better(v, line, best_sum[0], best_line[0]):
            best_sum[0] = v
            best_line[0] = line
        if v > den:
            _collect(coll, coll_cnt, 0, cap, v, a, b, c, t, s)

    # sequential merge keeps the result independent of the thread count
    gbest = best_sum[0]
    gline = best_line[0].copy()
    for tid in range(1, nthreads):
        if _lex_better(best_sum[tid], best_line[tid], gbest, gline):
            gbest = best_sum[tid]
            gline = best_line[tid].copy()
    total = 0
    for tid in range(nthreads):
        total += coll_cnt[tid]
    out_lines = np.zeros((total, 5), dtype=np.int64)
    out_sums = np.zeros(total, dtype=np.int64)
    pos = 0
    for tid in range(nthreads):
        for r in range(coll_cnt[tid]):
            out_sums[pos] = coll[tid, r, 0]
            for idx in range(5):
                out_lines[pos, idx] = coll[tid, r, 1 + idx]
            pos += 1
    return gbest, gline, out_lines, out_sums


@njit(cache=NB_CACHE, inline="always")
def _collect(coll, coll_cnt, tid, cap, v, a, b, c, t, s):
    k = coll_cnt[tid]
    if k < cap:
        coll[tid, k, 0] = v
        coll[tid, k, 1] = a
        coll[tid, k, 2] = b
        coll[tid, k, 3] = c
        coll[tid, k, 4] = t
        coll[tid, k, 5] = s
        coll_cnt[tid] = k + 1
        return
    # full: replace the smallest kept sum if this one is larger
    mi = 0
    mv = coll[tid, 0, 0]
    for r in range(1, cap):
        if coll[tid, r, 0] < mv:
            mv = coll[tid, r, 0]
            mi = r
    if v > mv:
        coll[tid, mi, 0] = v
        coll[tid, mi, 1] = a
        coll[tid, mi, 2] = b
        coll[tid, mi, 3] = c
        coll[tid, mi, 4] = t
        coll[tid, mi, 5] = s


@njit(cache=NB_CACHE, parallel=True)
def scan_max_pierce(n):
    """Exact max snake size over all candidate lines, with a witness."""
    nv = (n + 1) * (n + 1)
    nthreads = get_num_threads()
    best = np.full(nthreads, -1, dtype=np.int64)
    bline = np.zeros((nthreads, 5), dtype=np.int64)
    half = (nv + 1) // 2
    for ii in prange(nv):
        tid = get_thread_id()
        # interleave the triangular outer loop so static prange chunks balance
        idx1 = 2 * ii if ii < half else 2 * (ii - half) + 1
        x1 = idx1 // (n + 1)
        y1 = idx1 % (n + 1)
        line = np.zeros(5, dtype=np.int64)
        for idx2 in range(idx1 + 1, nv):
            x2 = idx2 // (n + 1)
            y2 = idx2 % (n + 1)
            if not _is_chain_end_pair(x1, y1, x2, y2, n):
                continue
            a, b, c = _pair_line(x1, y1, x2, y2)
            for t in (-1, 1):
                for s in (-1, 1):
                    cnt, _ = _walk_count_stair(a, b, c, t, s, n)
                    line[0], line[1], line[2], line[3], line[4] = a, b, c, t, s
                    if _lex_better(cnt, line, best[tid], bline[tid]):
                        best[tid] = cnt
                        bline[tid] = line
    classb = _class_b_lines(n)
    line = np.zeros(5, dtype=np.int64)
    for k in range(classb.shape[0]):
        a, b, c, t, s = classb[k, 0], classb[k, 1], classb[k, 2], classb[k, 3], classb[k, 4]
        cnt, _ = _walk_count_stair(a, b, c, t, s, n)
        line[0], line[1], line[2], line[3], line[4] = a, b, c, t, s
        if _lex_better(cnt, line, best[0], bline[0]):
            best[0] = cnt
            bline[0] = line
    gbest = best[0]
    gline = bline[0].copy()
    for tid in range(1, nthreads):
        if _lex_better(best[tid], bline[tid], gbest, gline):
            gbest = best[tid]
            gline = bline[tid].copy()
    return gbest, gline


@njit(cache=NB_CACHE, parallel=True)
def scan_max_hit(n):
    """Exact max hit-set size over candidate base lines, with a witness."""
    nv = (n + 1) * (n + 1)
    nthreads = get_num_threads()
    best = np.full(nthreads, -1, dtype=np.int64)
    bline = np.zeros((nthreads, 5), dtype=np.int64)
    half = (nv + 1) // 2
    for ii in prange(nv):
        tid = get_thread_id()
        # interleave the triangular outer loop so static prange chunks balance
        idx1 = 2 * ii if ii < half else 2 * (ii - half) + 1
        x1 = idx1 // (n + 1)
        y1 = idx1 % (n + 1)
        line = np.zeros(5, dtype=np.int64)
        for idx2 in range(idx1 + 1, nv):
            x2 = idx2 // (n + 1)
            y2 = idx2 % (n + 1)
            if not _is_chain_end_pair(x1, y1, x2, y2, n):
                continue
            a, b, c = _pair_line(x1, y1, x2, y2)
            cnt = _hit_count(a, b, c, n)
            line[0], line[1], line[2], line[3], line[4] = a, b, c, 0, 0
            if _lex_better(cnt, line, best[tid], bline[tid]):
                best[tid] = cnt
                bline[tid] = line
    classb = _class_b_lines(n)
    line = np.zeros(5, dtype=np.int64)
    for k in range(classb.shape[0]):
        a, b, c = classb[k, 0], classb[k, 1], classb[k, 2]
        cnt = _hit_count(a, b, c, n)
        line[0], line[1], line[2], line[3], line[4] = a, b, c, 0, 0
        if _lex_better(cnt, line, best[0], bline[0]):
            best[0] = cnt
            bline[0] = line
    gbest = best[0]
    gline = bline[0].copy()
    for tid in range(1, nthreads):
        if _lex_better(best[tid], bline[tid], gbest, gline):
            gbest = best[tid]
            gline = bline[tid].copy()
    return gbest, gline


# --- dense simplex iteration ----------------------------------------------------


@njit(cache=NB_CACHE, parallel=True)
def simplex_iterate(T, cost, basis, allowed, piv_tol, opt_tol, max_iter, bland_after):
    """Run simplex pivots on a dense tableau until optimal/unbounded/capped.

    Minimization convention: ``cost`` holds reduced costs with cost[-1] equal
    to minus the objective value.  Entering rule is largest-coefficient
    (most negative reduced cost), switching to Bland's rule after
    ``bland_after`` pivots without objective improvement.

    Returns (status, iterations): 0 optimal, 1 unbounded, 2 iteration cap.
    """
    m = T.shape[0]
    ncols = T.shape[1] - 1
    bland = False
    stall = 0
    last = cost[ncols]
    it = 0
    while it < max_iter:
        enter = -1
        if bland:
            for j in range(ncols):
                if allowed[j] and cost[j] < -opt_tol:
                    enter = j
                    break
        else:
            best = -opt_tol
            for j in range(ncols):
                if allowed[j] and cost[j] < best:
                    best = cost[j]
                    enter = j
        if enter < 0:
            return 0, it
        # two-pass ratio test: exact minimum first, then smallest basic
        # index among near-ties (drifting tie-breaks accumulate infeasibility)
        best_ratio = np.inf
        for i in range(m):
            aij = T[i, enter]
            if aij > piv_tol:
                ratio = T[i, ncols] / aij
                if ratio < best_ratio:
                    best_ratio = ratio
        if best_ratio == np.inf:
            return 1, it
        leave = -1
        for i in range(m):
            aij = T[i, enter]
            if aij > piv_tol:
                ratio = T[i, ncols] / aij
                if ratio <= best_ratio + 1e-12 and (leave < 0 or basis[i] < basis[leave]):
                    leave = i
        piv = T[leave, enter]
        for j in range(ncols + 1):
            T[leave, j] /= piv
        for i in prange(m):
            if i != leave:
                f = T[i, enter]
                if f != 0.0:
                    for j in range(ncols + 1):
                        T[i, j] -= f * T[leave, j]
        f = cost[enter]
        if f != 0.0:
            for j in range(ncols + 1):
                cost[j] -= f * T[leave, j]
        basis[leave] = enter
        it += 1
        obj = cost[ncols]
        if obj > last + 1e-12:
            last = obj
            stall = 0
            bland = False
        else:
            stall += 1
            if stall >= bland_after:
                bland = True
    return 2, it


# --- density line-integral scan ---------------------------------------------------
#
# Line integrals of sign-symmetric monomial densities sum(c * |x|^p * |y|^q)
# along y = a*x + b against the l1 length element (1 + a) dx, for scan
# parameters a in [0, 1], b in [0, 1 + a].


@njit(cache=NB_CACHE, inline="always")
def _binom(q, k):
    out = 1.0
    for i in range(k):
        out = out * (q - i) / (i + 1)
    return out


@njit(cache=NB_CACHE)
def _line_integral_at(coefs, pxs, pys, a, b):
    if b > 1.0 + a:
        return 0.0
    if a == 0.0:
        x1 = -1.0
        x2 = 1.0
        if b > 1.0:
            return 0.0
        m1 = -1.0
    else:
        x1 = max(-1.0, (-1.0 - b) / a)
        x2 = min(1.0, (1.0 - b) / a)
        if x2 <= x1:
            return 0.0
        m1 = -b / a
        if m1 < x1:
            m1 = x1
        if m1 > x2:
            m1 = x2
    m2 = 0.0
    if m2 < m1:
        m2 = m1
    if m2 > x2:
        m2 = x2
    total = 0.0
    for piece in range(3):
        if piece == 0:
            u, v, sx, sy = x1, m1, -1.0, -1.0
        elif piece == 1:
            u, v, sx, sy = m1, m2, -1.0, 1.0
        else:
            u, v, sx, sy = m2, x2, 1.0, 1.0
        if v <= u:
            continue
        for idx in range(len(coefs)):
            p = pxs[idx]
            q = pys[idx]
            sgn = coefs[idx] * sx**p * sy**q
            acc = 0.0
            for k in range(q + 1):
                e = p + k + 1
                acc += _binom(q, k) * a**k * b ** (q - k) * (v**e - u**e) / e
            total += sgn * acc
    return (1.0 + a) * total


@njit(cache=NB_CACHE, parallel=True)
def density_line_integrals(coefs, pxs, pys, a_vals, b_vals):
    m = len(a_vals)
    out = np.empty(m, dtype=np.float64)
    for i in prange(m):
        out[i] = _line_integral_at(coefs, pxs, pys, a_vals[i], b_vals[i])
    return out


@njit(cache=NB_CACHE)
def accumulate_coverage(jlo, jhi, transposed, masses, n):
    """Sum per-line masses into the cells of each line's range set."""
    cov = np.zeros((n, n), dtype=np.float64)
    for k in range(jlo.shape[0]):
        w = masses[k]
        if w == 0.0:
            continue
        if transposed[k]:
            for col in range(n):
                lo = jlo[k, col]
                hi = jhi[k, col]
                for j in range(lo, hi + 1):
                    cov[j - 1, col] += w
        else:
            for col in range(n):
                lo = jlo[k, col]
                hi = jhi[k, col]
                for j in range(lo, hi + 1):
                    cov[col, j - 1] += w
    return cov
