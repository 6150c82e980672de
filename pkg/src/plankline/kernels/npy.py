"""Pure-numpy fallback for the walk kernels (no JIT).

Same integer semantics as kernels.jit, implemented with vectorized int64
array arithmetic.  Slower but dependency-light; selected by
``PLANKLINE_BACKEND=numpy``.
"""

from __future__ import annotations

import numpy as np


def _normalize(lines):
    """Split perturbed scaled lines into walk-normalized components.

    Vertical lines (b == 0) are transposed (walked as horizontals); rows
    with b < 0 are sign-flipped.  Returns (a, b, c, t, s, transposed).
    """
    a = lines[:, 0].astype(np.int64).copy()
    b = lines[:, 1].astype(np.int64).copy()
    c = lines[:, 2].astype(np.int64).copy()
    if lines.shape[1] == 5:
        t = lines[:, 3].astype(np.int64).copy()
        s = lines[:, 4].astype(np.int64).copy()
    else:
        t = np.zeros(len(a), dtype=np.int64)
        s = np.zeros(len(a), dtype=np.int64)
    transposed = b == 0
    a2 = np.where(transposed, 0, a)
    b2 = np.where(transposed, a, b)
    a, b = a2, b2
    neg = b < 0
    a = np.where(neg, -a, a)
    b = np.where(neg, -b, b)
    c = np.where(neg, -c, c)
    return a, b, c, t, s, transposed.astype(np.uint8)


def _delta_sign(d1, s):
    out = np.sign(d1)
    zero = out == 0
    out[zero] = np.sign(s if np.isscalar(s) else np.broadcast_to(s, d1.shape)[zero])
    return out


def _column_values(a, b, c, t, n):
    xl = np.arange(n, dtype=np.int64)[None, :]
    xr = xl + 1
    p_l = c[:, None] - a[:, None] * xl
    p_r = c[:, None] - a[:, None] * xr
    d_l = t[:, None] * (2 * xl - n)
    d_r = t[:, None] * (2 * xr - n)
    left_is_lo = (p_l < p_r) | ((p_l == p_r) & (d_l <= d_r))
    p_lo = np.where(left_is_lo, p_l, p_r)
    d_lo = np.where(left_is_lo, d_l, d_r)
    p_hi = np.where(left_is_lo, p_r, p_l)
    d_hi = np.where(left_is_lo, d_r, d_l)
    return p_lo, d_lo, p_hi, d_hi


def pierce_ranges(lines, n):
    lines = np.asarray(lines, dtype=np.int64)
    a, b, c, t, s, transposed = _normalize(lines)
    p_lo, d_lo, p_hi, d_hi = _column_values(a, b, c, t, n)
    bb = b[:, None]
    ss = np.broadcast_to(s[:, None], p_lo.shape)

    fl = np.floor_divide(p_lo, bb)
    rem = p_lo - fl * bb
    dsg = _delta_sign(d_lo.copy(), ss)
    jlo = fl + np.where((rem == 0) & (dsg < 0), 0, 1)

    fl2 = np.floor_divide(p_hi, bb)
    rem2 = p_hi - fl2 * bb
    dsg2 = _delta_sign(d_hi.copy(), ss)
    jhi = np.where(rem2 != 0, fl2 + 1, np.where(dsg2 > 0, fl2 + 1, fl2))

    np.clip(jlo, 1, None, out=jlo)
    np.clip(jhi, None, n, out=jhi)
    return jlo, jhi, transposed


def hit_ranges(lines, n):
    lines = np.asarray(lines, dtype=np.int64)
    a, b, c, _, _, transposed = _normalize(lines)
    xl = np.arange(n, dtype=np.int64)[None, :]
    p_l = c[:, None] - a[:, None] * xl
    p_r = c[:, None] - a[:, None] * (xl + 1)
    p_lo = np.minimum(p_l, p_r)
    p_hi = np.maximum(p_l, p_r)
    bb = b[:, None]
    jlo = -np.floor_divide(-p_lo, bb)
    jhi = np.floor_divide(p_hi, bb) + 1
    np.clip(jlo, 1, None, out=jlo)
    np.clip(jhi, None, n, out=jhi)
    return jlo, jhi, transposed


def pierce_stats(lines, n):
    lines = np.asarray(lines, dtype=np.int64)
    jlo, jhi, _ = pierce_ranges(lines, n)
    a, b, _, _, _, _ = _normalize(lines)
    width = np.maximum(jhi - jlo + 1, 0)
    counts = width.sum(axis=1)

    nonempty = width > 0
    # contiguity of the nonempty column run
    first = np.argmax(nonempty, axis=1)
    last = n - 1 - np.argmax(nonempty[:, ::-1], axis=1)
    run_len = np.where(counts > 0, last - first + 1, 0)
    contiguous = nonempty.sum(axis=1) == run_len

    both = nonempty[:, :-1] & nonempty[:, 1:]
    ascending = (a <= 0)[:, None]
    ok_up = (jlo[:, 1:] == jhi[:, :-1]) | (jlo[:, 1:] == jhi[:, :-1] + 1)
    ok_down = (jhi[:, 1:] == jlo[:, :-1]) | (jhi[:, 1:] == jlo[:, :-1] - 1)
    trans_ok = np.where(ascending, ok_up, ok_down) | ~both
    stair = (contiguous & trans_ok.all(axis=1)).astype(np.uint8)
    return counts.astype(np.int64), stair


def _range_sums(jlo, jhi, transposed, n, wnum):
    wnum = np.asarray(wnum, dtype=np.int64)
    pref = np.zeros((n, n + 1), dtype=np.int64)
    np.cumsum(wnum, axis=1, out=pref[:, 1:])
    pref_t = np.zeros((n, n + 1), dtype=np.int64)
    np.cumsum(wnum.T, axis=1, out=pref_t[:, 1:])

    empty = jlo > jhi
    lo = np.where(empty, 1, jlo)
    hi = np.where(empty, 0, jhi)
    cols = np.arange(n, dtype=np.int64)[None, :]
    direct = pref[cols, hi] - pref[cols, lo - 1]
    swapped = pref_t[cols, hi] - pref_t[cols, lo - 1]
    picked = np.where(transposed[:, None].astype(bool), swapped, direct)
    picked[empty] = 0
    return picked.sum(axis=1)


def pierce_sums(lines, n, wnum):
    jlo, jhi, transposed = pierce_ranges(lines, n)
    return _range_sums(jlo, jhi, transposed, n, wnum)


def hit_sums(lines, n, wnum):
    jlo, jhi, transposed = hit_ranges(lines, n)
    return _range_sums(jlo, jhi, transposed, n, wnum)


# --- candidate enumeration ------------------------------------------------------


def class_b_lines(n):
    rows = []
    for k in range(n + 1):
        for s in (-1, 1):
            rows.append((0, 1, k, 0, s))
            rows.append((1, 0, k, 0, s))
    for k in range(-n, n + 1):
        for s in (-1, 1):
            rows.append((-1, 1, k, 0, s))
    for k in range(0, 2 * n + 1):
        for s in (-1, 1):
            rows.append((1, 1, k, 0, s))
    return np.array(rows, dtype=np.int64)


def iter_candidate_blocks(n, with_perturbations=True, block_rows=200_000):
    """Yield candidate lines as (m, 5) int64 blocks, deduplicated.

    Vertex-pair lines appear once (first/last lattice point rule) with the
    four (tilt, shift) corners when ``with_perturbations``; class-b lines
    (axis/diagonal shifts) always close the stream.
    """
    nv = (n + 1) * (n + 1)
    pending = []
    pending_rows = 0
    for idx1 in range(nv):
        x1 = idx1 // (n + 1)
        y1 = idx1 % (n + 1)
        idx2 = np.arange(idx1 + 1, nv, dtype=np.int64)
        if len(idx2) == 0:
            continue
        x2 = idx2 // (n + 1)
        y2 = idx2 % (n + 1)
        dx = x2 - x1
        dy = y2 - y1
        g = np.gcd(dx, dy)
        px = dx // g
        py = dy // g
        prev_in = (0 <= x1 - px) & (x1 - px <= n) & (0 <= y1 - py) & (y1 - py <= n)
        nxt_in = (0 <= x2 + px) & (x2 + px <= n) & (0 <= y2 + py) & (y2 + py <= n)
        keep = ~(prev_in | nxt_in)
        if not keep.any():
            continue
        dxk, dyk = dx[keep], dy[keep]
        x2k, y2k = x2[keep], y2[keep]
        a = dyk
        b = -dxk
        c = a * x1 + b * y1
        m = len(a)
        if with_perturbations:
            block = np.empty((4 * m, 5), dtype=np.int64)
            pos = 0
            for t in (-1, 1):
                for s in (-1, 1):
                    block[pos : pos + m, 0] = a
                    block[pos : pos + m, 1] = b
                    block[pos : pos + m, 2] = c
                    block[pos : pos + m, 3] = t
                    block[pos : pos + m, 4] = s
                    pos += m
        else:
            block = np.zeros((m, 5), dtype=np.int64)
            block[:, 0] = a
            block[:, 1] = b
            block[:, 2] = c
        pending.append(block)
        pending_rows += len(block)
        if pending_rows >= block_rows:
            yield np.concatenate(pending, axis=0)
            pending = []
            pending_rows = 0
    classb = class_b_lines(n)
    if not with_perturbations:
        classb = classb.copy()
        classb[:, 3:] = 0
        classb = np.unique(classb, axis=0)
    pending.append(classb)
    yield np.concatenate(pending, axis=0)


def _lex_best(sums, lines):
    """Index of the row with the largest sum, ties broken by smallest line tuple."""
    top = sums.max()
    idx = np.nonzero(sums == top)[0]
    if len(idx) == 1:
        return idx[0]
    rows = [tuple(lines[i]) for i in idx]
    return idx[min(range(len(idx)), key=lambda k: rows[k])]


def scan_separation(n, wnum, den, cap):
    best_sum = None
    best_line = None
    viol_lines = []
    viol_sums = []
    for block in iter_candidate_blocks(n):
        sums = pierce_sums(block, n, wnum)
        k = _lex_best(sums, block)
        cand = (sums[k], tuple(block[k]))
        if best_sum is None or cand[0] > best_sum or (cand[0] == best_sum and cand[1] < tuple(best_line)):
            best_sum, best_line = cand[0], block[k].copy()
        mask = sums > den
        if mask.any():
            viol_lines.append(block[mask])
            viol_sums.append(sums[mask])
            if sum(len(v) for v in viol_sums) > 16 * cap:
                lines_all = np.concatenate(viol_lines)
                sums_all = np.concatenate(viol_sums)
                order = np.argsort(-sums_all, kind="stable")[: 8 * cap]
                viol_lines = [lines_all[order]]
                viol_sums = [sums_all[order]]
    if viol_lines:
        lines_all = np.concatenate(viol_lines)
        sums_all = np.concatenate(viol_sums)
    else:
        lines_all = np.zeros((0, 5), dtype=np.int64)
        sums_all = np.zeros(0, dtype=np.int64)
    return int(best_sum), best_line, lines_all, sums_all


def scan_max_pierce(n):
    best = -1
    best_line = None
    for block in iter_candidate_blocks(n):
        counts, _ = pierce_stats(block, n)
        k = _lex_best(counts, block)
        if counts[k] > best or (counts[k] == best and tuple(block[k]) < tuple(best_line)):
            best = int(counts[k])
            best_line = block[k].copy()
    return best, best_line


def scan_max_hit(n):
    best = -1
    best_line = None
    for block in iter_candidate_blocks(n, with_perturbations=False):
        jlo, jhi, _ = hit_ranges(block, n)
        counts = np.maximum(jhi - jlo + 1, 0).sum(axis=1)
        k = _lex_best(counts, block)
        if counts[k] > best or (counts[k] == best and tuple(block[k]) < tuple(best_line)):
            best = int(counts[k])
            best_line = block[k].copy()
    return best, best_line


# --- dense simplex iteration (vectorized fallback) --------------------------------


def simplex_iterate(T, cost, basis, allowed, piv_tol, opt_tol, max_iter, bland_after):
    """Numpy twin of kernels.jit.simplex_iterate (same rules, same returns)."""
    m, ncols1 = T.shape
    ncols = ncols1 - 1
    bland = False
    stall = 0
    last = cost[ncols]
    it = 0
    masked = np.empty(ncols, dtype=np.float64)
    while it < max_iter:
        np.copyto(masked, cost[:ncols])
        masked[~allowed[:ncols]] = np.inf
        if bland:
            hits = np.nonzero(masked < -opt_tol)[0]
            if len(hits) == 0:
                return 0, it
            enter = int(hits[0])
        else:
            enter = int(np.argmin(masked))
            if masked[enter] >= -opt_tol:
                return 0, it
        col = T[:, enter]
        pos = col > piv_tol
        if not pos.any():
            return 1, it
        ratios = np.full(m, np.inf)
        ratios[pos] = T[pos, ncols] / col[pos]
        best = ratios.min()
        near = np.nonzero(ratios <= best + 1e-12)[0]
        leave = int(near[np.argmin(basis[near])])
        piv = T[leave, enter]
        T[leave] /= piv
        factors = T[:, enter].copy()
        factors[leave] = 0.0
        T -= factors[:, None] * T[leave][None, :]
        f = cost[enter]
        if f != 0.0:
            cost -= f * T[leave]
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


# --- density line-integral scan (vectorized fallback) ------------------------------


def density_line_integrals(coefs, pxs, pys, a_vals, b_vals):
    """Numpy twin of kernels.jit.density_line_integrals."""
    from math import comb

    a = np.asarray(a_vals, dtype=np.float64)
    b = np.asarray(b_vals, dtype=np.float64)
    alive = b <= 1.0 + a
    azero = a == 0.0
    with np.errstate(divide="ignore", invalid="ignore"):
        x1 = np.where(azero, -1.0, np.maximum(-1.0, (-1.0 - b) / np.where(azero, 1.0, a)))
        x2 = np.where(azero, 1.0, np.minimum(1.0, (1.0 - b) / np.where(azero, 1.0, a)))
        m1 = np.where(azero, -1.0, -b / np.where(azero, 1.0, a))
    alive &= np.where(azero, b <= 1.0, x2 > x1)
    m1 = np.clip(m1, x1, x2)
    m2 = np.clip(np.zeros_like(a), m1, x2)
    total = np.zeros_like(a)
    pieces = ((x1, m1, -1.0, -1.0), (m1, m2, -1.0, 1.0), (m2, x2, 1.0, 1.0))
    for u, v, sx, sy in pieces:
        width = v - u
        live = width > 0
        if not live.any():
            continue
        piece_sum = np.zeros_like(a)
        for idx in range(len(coefs)):
            p = int(pxs[idx])
            q = int(pys[idx])
            sgn = float(coefs[idx]) * sx**p * sy**q
            acc = np.zeros_like(a)
            for k in range(q + 1):
                e = p + k + 1
                acc += comb(q, k) * a**k * b ** (q - k) * (v**e - u**e) / e
            piece_sum += sgn * acc
        total += np.where(live, piece_sum, 0.0)
    return np.where(alive, (1.0 + a) * total, 0.0)


def accumulate_coverage(jlo, jhi, transposed, masses, n):
    """Numpy twin of kernels.jit.accumulate_coverage (difference-array trick)."""
    m = jlo.shape[0]
    masses = np.asarray(masses, dtype=np.float64)
    cov = np.zeros((n, n))
    diff = np.zeros((n, n + 1))
    empty = jlo > jhi
    for flag, pick in ((False, ~transposed.astype(bool)), (True, transposed.astype(bool))):
        sel = pick & ~(empty.all(axis=1))
        idx = np.nonzero(sel)[0]
        if len(idx) == 0:
            continue
        diff[:] = 0.0
        for k in idx:
            w = masses[k]
            if w == 0.0:
                continue
            lo = jlo[k]
            hi = jhi[k]
            ok = lo <= hi
            cols = np.nonzero(ok)[0]
            diff[cols, lo[cols] - 1] += w
            diff[cols, hi[cols]] -= w
        acc = np.cumsum(diff[:, :-1], axis=1)
        cov += acc.T if flag else acc
    return cov
