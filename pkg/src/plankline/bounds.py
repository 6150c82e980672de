"""Bound pipelines: certified LP_d lower bounds via constraint generation,
exhaustive set-cover search for exact p_n/h_n, and k-line feasibility.

The cover search is single-threaded depth-first (deterministic) over
inclusion-maximal snakes / hit sets, with most-constrained-cell branching,
an orbit-representative restriction on the first chosen set, and an
exactly certified fractional-LP bound at the root.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Literal, Optional

import numpy as np

from .constructions import hitting_family, piercing_family
from .geometry import Board, Cell, DIHEDRAL, Line, PerturbedLine, Snake, hit_cells_of_line, snake_of_line
from .lp import BoundCertificate, LinearProgram, certify_dual_weights, solve_lp
from .snakes import (
    WeightGrid,
    enumerate_snakes,
    hit_family,
    separation_scan_raw,
)

Mode = Literal["pierce", "hit"]


class ResourceGuardError(RuntimeError):
    """Raised when a search exceeds its configured size guard."""


@dataclass
class CoverResult:
    n: int
    mode: Mode
    k: int
    feasible: bool
    witness: Optional[list[PerturbedLine]] = None
    nodes: int = 0
    proof: str = "search"


# --- LP_d lower bound via constraint generation -----------------------------------

QUANT_BITS = 44


def lp_dual_bound(
    board: Board,
    tolerance: float = 1e-9,
    max_rounds: int = 400,
    cuts_per_round: int = 32,
    verbose: bool = False,
) -> BoundCertificate:
    """Certified lower bound M_n from the dual weight LP.

    Restricted-master loop: start from the axis-parallel snakes, solve the
    restricted (LP_d) in floats, quantize the weights exactly, and run the
    exact separation scan; violated lines join the master until the exact
    worst sum is at most 1 + tolerance.  The returned certificate holds the
    quantized weights scaled into exact feasibility, so it is valid whether
    or not the loop converged.
    """
    n = board.n
    den = 1 << QUANT_BITS
    rows: list[tuple[Cell, ...]] = []
    seen: set[tuple[Cell, ...]] = set()

    def add_row(cells) -> bool:
        key = tuple(sorted(cells))
        if key in seen:
            return False
        seen.add(key)
        rows.append(key)
        return True

    for i in range(1, n + 1):
        add_row(tuple((i, j) for j in range(1, n + 1)))
        add_row(tuple((j, i) for j in range(1, n + 1)))

    stop_num = int(den * (1 + max(tolerance, 1e-8)))
    converged = False
    stalled = False
    rounds = 0
    wnum = np.zeros((n, n), dtype=np.int64)
    best_sum = den
    master_value = float(n)

    master_history: list[float] = []
    for rounds in range(1, max_rounds + 1):
        master_value, weights = _solve_master(rows, n)
        master_history.append(master_value)
        wnum = np.floor(np.clip(weights, 0.0, None) * den).astype(np.int64)
        best_sum, best_line, viol_lines, viol_sums = separation_scan_raw(
            board, wnum, den, cap=max(cuts_per_round * 8, 256)
        )
        if verbose:
            print(
                f"round {rounds}: master={master_value:.6f} rows={len(rows)} "
                f"worst={best_sum / den:.9f} violated={len(viol_sums)}"
            )
        if best_sum <= stop_num:
            converged = True
            break
        order = sorted(
            range(len(viol_sums)),
            key=lambda k: (-int(viol_sums[k]), tuple(int(v) for v in viol_lines[k])),
        )
        added = 0
        for k in order:
            cells = _scaled_line_cells(n, viol_lines[k])
            if cells and add_row(cells):
                added += 1
                if added >= cuts_per_round:
                    break
        if added == 0:
            stalled = True
            break

    total_num = int(wnum.sum())
    denom = max(best_sum, den)
    scaled = WeightGrid(
        n,
        {
            (i + 1, j + 1): Fraction(int(wnum[i, j]), denom)
            for i in range(n)
            for j in range(n)
            if wnum[i, j]
        },
    )
    bound = Fraction(total_num, denom)
    meta = {
        "method": "lp_dual_bound",
        "rounds": rounds,
        "converged": converged,
        "stalled": stalled,
        "master_rows": len(rows),
        "master_value": master_value,
        "master_history": master_history,
        "tolerance": tolerance,
    }
    cert = BoundCertificate(
        n,
        "lower",
        bound,
        witness_weights=scaled,
        worst_sum=Fraction(best_sum, denom),
        generator=meta,
    )
    snapped = _snap_certificate(board, weights, bound, meta)
    return snapped if snapped is not None else cert


# denominators that recover exact LP vertices at small n (lcm(1..18), lcm(1..25))
_SNAP_DENOMS = (12252240, 26771144400)


def _snap_certificate(board, weights: np.ndarray, floor_bound: Fraction, meta: dict):
    """Try rounding the float weights onto coarse rational grids; keep the
    best exactly-certified result if it beats the floor-quantized bound."""
    if board.n > 12:
        return None
    best = None
    for d0 in _SNAP_DENOMS:
        grid = {}
        for i in range(board.n):
            for j in range(board.n):
                q = Fraction(max(round(weights[i, j] * d0), 0), d0)
                if q:
                    grid[(i + 1, j + 1)] = q
        cert = certify_dual_weights(board, WeightGrid(board.n, grid), generator=dict(meta))
        if cert.bound >= floor_bound and (best is None or cert.bound > best.bound):
            best = cert
            best.generator["snapped_denominator"] = d0
    return best


def _scaled_line_cells(n: int, row) -> tuple[Cell, ...]:
    from . import kernels

    lines = np.asarray([row], dtype=np.int64)
    jlo, jhi, transposed = kernels.pierce_ranges(lines, n)
    return tuple(kernels.ranges_to_cells(jlo[0], jhi[0], bool(transposed[0])))


def _solve_master(rows: list[tuple[Cell, ...]], n: int) -> tuple[float, np.ndarray]:
    """Restricted (LP_d): maximize total weight under the active snake rows.

    Solved directly when the row count is moderate; otherwise via its dual
    (a covering LP with only n^2 rows), recovering the weights as duals.
    """
    m = len(rows)
    nn = n * n
    S = np.zeros((m, nn))
    for r, cells in enumerate(rows):
        for (i, j) in cells:
            S[r, (i - 1) * n + (j - 1)] = 1.0
    if m <= max(1200, 2 * nn):
        lp = LinearProgram("max", np.ones(nn), S, ["<="] * m, np.ones(m))
        sol = solve_lp(lp)
        if sol.status != "optimal":
            raise RuntimeError(f"restricted master did not solve: {sol.status}")
        return sol.value, sol.x.reshape(n, n)
    lp = LinearProgram("min", np.ones(m), S.T, [">="] * nn, np.ones(nn))
    sol = solve_lp(lp)
    if sol.status != "optimal":
        raise RuntimeError(f"restricted master (dual) did not solve: {sol.status}")
    return sol.value, np.clip(sol.duals, 0.0, None).reshape(n, n)


# --- exact cover search --------------------------------------------------------


def fractional_cover_optimum(board: Board, mode: Mode) -> float:
    """Optimum of the covering relaxation over the full maximal family
    (equals the weight-LP optimum by duality; float, for tests/reports)."""
    masks = _pierce_sets(board) if mode == "pierce" else _hit_sets(board)
    n = board.n
    m = len(masks)
    S = np.zeros((m, n * n))
    for r, (mask, _) in enumerate(masks):
        for pos in range(n * n):
            if mask >> pos & 1:
                S[r, pos] = 1.0
    lp = LinearProgram("min", np.ones(m), S.T, [">="] * (n * n), np.ones(n * n))
    sol = solve_lp(lp)
    if sol.status != "optimal":
        raise RuntimeError(f"covering LP failed: {sol.status}")
    return sol.value


def _pierce_sets(board: Board):
    family = enumerate_snakes(board)
    maximal = family.maximal()
    masks = []
    for snake in maximal:
        mask = 0
        for (i, j) in snake.cells:
            mask |= 1 << ((i - 1) * board.n + (j - 1))
        masks.append((mask, family.witnesses[snake.key()]))
    return masks


def _hit_sets(board: Board):
    order, witnesses = hit_family(board)
    keep: list[frozenset] = []
    for cells in sorted(order, key=len, reverse=True):
        if not any(cells < other for other in keep):
            keep.append(cells)
    masks = []
    for cells in keep:
        mask = 0
        for (i, j) in cells:
            mask |= 1 << ((i - 1) * board.n + (j - 1))
        masks.append((mask, PerturbedLine(witnesses[cells], 0, 0)))
    return masks


def _orbit_representatives(masks: list[tuple[int, PerturbedLine]], n: int) -> list[int]:
    """Indices of one lexicographically-smallest member per symmetry orbit."""
    def transform(mask: int, g) -> int:
        out = 0
        for pos in range(n * n):
            if mask >> pos & 1:
                i, j = pos // n + 1, pos % n + 1
                gi, gj = g.cell(n, (i, j))
                out |= 1 << ((gi - 1) * n + (gj - 1))
        return out

    canon_to_best: dict[int, int] = {}
    for idx, (mask, _) in enumerate(masks):
        canon = min(transform(mask, g) for g in DIHEDRAL)
        best = canon_to_best.get(canon)
        if best is None or masks[idx][0] < masks[best][0]:
            canon_to_best[canon] = idx
    return sorted(canon_to_best.values())


def certified_family_lp_bound(n: int, masks: list[int]) -> Fraction:
    """Exact lower bound on the fractional cover number of the family.

    Solves the weight LP over the maximal sets in floats, then certifies by
    quantizing and taking the exact worst set sum.  Because every line's
    set is contained in some maximal family member, the worst sum over the
    family equals the worst over all lines.
    """
    m = len(masks)
    nn = n * n
    S = np.zeros((m, nn))
    for r, mask in enumerate(masks):
        for pos in range(nn):
            if mask >> pos & 1:
                S[r, pos] = 1.0
    lp = LinearProgram("max", np.ones(nn), S, ["<="] * m, np.ones(m))
    sol = solve_lp(lp)
    if sol.status != "optimal":
        raise RuntimeError(f"family LP failed: {sol.status}")
    den = 1 << QUANT_BITS
    q = np.floor(np.clip(sol.x, 0.0, None) * den).astype(np.int64)
    worst = 0
    for mask in masks:
        total = 0
        for pos in range(nn):
            if mask >> pos & 1:
                total += int(q[pos])
        worst = max(worst, total)
    return Fraction(int(q.sum()), max(worst, den))


def cover_search(
    board: Board,
    mode: Mode,
    k: int,
    use_lp_bound: bool = True,
    node_limit: int = 50_000_000,
) -> CoverResult:
    """Exhaustive decision: can k lines of the given mode cover all cells?"""
    n = board.n
    if not (0 <= k <= n):
        raise ValueError("need 0 <= k <= n")
    masks = _pierce_sets(board) if mode == "pierce" else _hit_sets(board)
    full = (1 << (n * n)) - 1
    if k == 0:
        return CoverResult(n, mode, 0, full == 0, [] if full == 0 else None, 0, "trivial")

    max_size = max(bin(m).count("1") for m, _ in masks)
    if max_size * k < n * n:
        return CoverResult(n, mode, k, False, None, 0, "counting")
    if use_lp_bound:
        lp_bound = certified_family_lp_bound(n, [m for m, _ in masks])
        if lp_bound > k:
            return CoverResult(n, mode, k, False, None, 0, f"lp-bound {lp_bound}")

    cell_sets: list[list[int]] = [[] for _ in range(n * n)]
    for idx, (mask, _) in enumerate(masks):
        for pos in range(n * n):
            if mask >> pos & 1:
                cell_sets[pos].append(idx)
    static_count = [len(s) for s in cell_sets]

    memo: dict[int, int] = {}
    nodes = 0

    def pick_cell(uncovered: int) -> int:
        best_pos, best_cnt = -1, 1 << 60
        pos = 0
        m = uncovered
        while m:
            if m & 1 and static_count[pos] < best_cnt:
                best_cnt = static_count[pos]
                best_pos = pos
            m >>= 1
            pos += 1
        return best_pos

    def dfs(uncovered: int, budget: int) -> Optional[list[int]]:
        nonlocal nodes
        nodes += 1
        if nodes > node_limit:
            raise ResourceGuardError(f"cover search exceeded {node_limit} nodes")
        if uncovered == 0:
            return []
        if budget == 0:
            return None
        if memo.get(uncovered, -1) >= budget:
            return None
        need = bin(uncovered).count("1")
        gains = [(bin(masks[idx][0] & uncovered).count("1"), idx)
                 for idx in cell_sets[pick_cell(uncovered)]]
        best_gain = max((g for g, _ in gains), default=0)
        if best_gain * budget < need:
            memo[uncovered] = max(memo.get(uncovered, -1), budget)
            return None
        gains.sort(key=lambda t: (-t[0], t[1]))
        for _, idx in gains:
            rest = dfs(uncovered & ~masks[idx][0], budget - 1)
            if rest is not None:
                return [idx] + rest
        memo[uncovered] = max(memo.get(uncovered, -1), budget)
        return None

    chosen: Optional[list[int]] = None
    for idx in _orbit_representatives(masks, n):
        rest = dfs(full & ~masks[idx][0], k - 1)
        if rest is not None:
            chosen = [idx] + rest
            break
    if chosen is None:
        return CoverResult(n, mode, k, False, None, nodes, "search")
    witness = [masks[idx][1] for idx in chosen]
    _validate_cover(board, mode, witness)
    return CoverResult(n, mode, k, True, witness, nodes, "search")


def _validate_cover(board: Board, mode: Mode, witness: list[PerturbedLine]) -> None:
    covered: set[Cell] = set()
    for pline in witness:
        if mode == "pierce":
            covered.update(snake_of_line(board, pline).cells)
        else:
            covered.update(hit_cells_of_line(board, pline.base))
    missing = [c for c in board.cells() if c not in covered]
    if missing:
        raise AssertionError(f"cover witness fails re-validation: missing {missing[:4]}")


def exact_min_cover(
    board: Board,
    mode: Mode,
    guard: int = 7,
    force: bool = False,
) -> tuple[int, list[PerturbedLine]]:
    """Exact p_n (pierce) or h_n (hit) by exhaustive search, with witness."""
    n = board.n
    if n > guard and not force:
        raise ResourceGuardError(
            f"exact_min_cover(n={n}) over the guard ({guard}); pass force to override"
        )
    if mode == "pierce":
        upper = [1] if n == 1 else None
        if n >= 3:
            upper_family = piercing_family(board).lines
        elif n == 2:
            upper_family = None  # found by the search at k=2
        else:
            upper_family = [PerturbedLine(Line.horizontal(0), 0, 0)]
        lower = max(1, math.ceil(Fraction(n * n, 2 * n - 1)))
    else:
        upper_family = hitting_family(board).lines
        lower = 1
    upper_k = len(upper_family) if upper_family is not None else n

    for k in range(lower, n + 1):
        if k >= upper_k and upper_family is not None:
            _validate_cover(board, mode, upper_family)
            return upper_k, upper_family
        result = cover_search(board, mode, k)
        if result.feasible:
            return k, result.witness
    raise AssertionError("no cover found up to k = n (impossible)")
