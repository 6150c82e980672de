"""Snake families: enumeration over the candidate line family, the exact
separation oracle for cell weights, and the per-n snake cache.

The candidate family contains, deduplicated:

(a) for every pair of distinct grid vertices, the line through them with
    the four perturbations (tilt, shift) in {-1,+1}^2;
(b) for every grid vertex, the axis-parallel and slope +-1 lines through
    it, shifted both ways; and
(c) the four board edge lines shifted inward (these coincide with the
    extreme class-(b) shifts).

Snakes are constant on the cells of the dual arrangement of grid-vertex
curves, and each arrangement cell's closure meets two dual curves or the
parameter boundary, which the three classes cover.  The randomized subset
property in the tests guards completeness independently.
"""

from __future__ import annotations

import json
import os
import tempfile
from dataclasses import dataclass, field
from fractions import Fraction
from math import lcm
from pathlib import Path
from typing import Iterable, Literal, Optional

import numpy as np

from . import kernels
from .geometry import (
    DIHEDRAL,
    Board,
    Cell,
    Line,
    PerturbedLine,
    Snake,
    apply_symmetry,
    format_rational,
    rational,
    snake_of_line,
)

GENERATOR_VERSION = "candidates-v1"

#: boards up to this size enumerate their full snake family on demand
SMALL_BOARD = 12


@dataclass(frozen=True)
class WeightGrid:
    """Nonnegative rational weights on the cells of an n x n board."""

    n: int
    weights: dict[Cell, Fraction]

    def __post_init__(self) -> None:
        for (i, j), w in self.weights.items():
            if not (1 <= i <= self.n and 1 <= j <= self.n):
                raise ValueError(f"cell ({i},{j}) outside board")
            if w < 0:
                raise ValueError(f"negative weight at ({i},{j})")

    @staticmethod
    def uniform(n: int, value) -> "WeightGrid":
        v = rational(value)
        return WeightGrid(n, {(i, j): v for i in range(1, n + 1) for j in range(1, n + 1)})

    def get(self, i: int, j: int) -> Fraction:
        return self.weights.get((i, j), Fraction(0))

    def total(self) -> Fraction:
        return sum(self.weights.values(), Fraction(0))

    def common_denominator(self) -> int:
        return lcm(*(w.denominator for w in self.weights.values())) if self.weights else 1

    def numerator_grid(self, den: int) -> np.ndarray:
        """Exact int64 numerators over the common denominator ``den``."""
        out = np.zeros((self.n, self.n), dtype=object)
        for (i, j), w in self.weights.items():
            q = w * den
            if q.denominator != 1:
                raise ValueError("den is not a common denominator")
            out[i - 1, j - 1] = int(q)
        return out

    def quantized(self, bits: int = 44) -> tuple["WeightGrid", int]:
        """Round each weight down to a multiple of 2**-bits (exact floor)."""
        den = 1 << bits
        grid = {}
        for cell, w in self.weights.items():
            grid[cell] = Fraction((w.numerator * den) // w.denominator, den)
        return WeightGrid(self.n, grid), den


@dataclass(frozen=True)
class SeparationReport:
    worst_line: PerturbedLine
    worst_sum: Fraction
    violated: bool


@dataclass
class SnakeFamily:
    n: int
    snakes: list[Snake]
    witnesses: dict[str, PerturbedLine]
    generator_version: str = GENERATOR_VERSION
    patched_for_symmetry: int = 0

    def __len__(self) -> int:
        return len(self.snakes)

    def maximal(self) -> list[Snake]:
        """Inclusion-maximal members (any snake cover extends to one by these)."""
        sets = [frozenset(s.cells) for s in self.snakes]
        order = sorted(range(len(sets)), key=lambda k: -len(sets[k]))
        keep: list[int] = []
        for k in order:
            if not any(sets[k] < sets[m] for m in keep):
                keep.append(k)
        keep_keys = {self.snakes[k].key() for k in keep}
        return [s for s in self.snakes if s.key() in keep_keys]


def _pline_from_scaled(n: int, row) -> PerturbedLine:
    a, b, c, t, s = (int(v) for v in row)
    return PerturbedLine(Line.from_scaled(n, a, b, c), t, s)


def candidate_lines(board: Board) -> list[PerturbedLine]:
    """The deduplicated candidate family as PerturbedLine objects.

    Intended for small boards; the batch scans stream the same family
    without materializing it.
    """
    seen = set()
    out = []
    for block in kernels.iter_candidate_blocks(board.n):
        for row in block:
            pline = _pline_from_scaled(board.n, row)
            key = (pline.base, pline.tilt, pline.shift)
            if key not in seen:
                seen.add(key)
                out.append(pline)
    return out


def candidate_count_bound(n: int) -> int:
    """The documented coarse bound on the family size."""
    nv = (n + 1) ** 2
    return 4 * (nv * (nv - 1) // 2) + 8 * nv + 8


def enumerate_snakes(board: Board, cache_dir: Optional[str | Path] = None) -> SnakeFamily:
    """All combinatorially distinct nonempty snakes of the candidate family.

    The result is deduplicated, keeps a witness line per snake, and is
    closed under the board symmetries (patched with re-verified witnesses
    in the rare case a symmetric image is not produced by a candidate).
    """
    n = board.n
    if cache_dir is not None:
        cached = load_family(cache_dir, n)
        if cached is not None:
            return cached

    witnesses: dict[str, PerturbedLine] = {}
    snakes: list[Snake] = []
    for block in kernels.iter_candidate_blocks(n):
        jlo, jhi, transposed = kernels.pierce_ranges(block, n)
        for k in range(len(block)):
            cells = kernels.ranges_to_cells(jlo[k], jhi[k], bool(transposed[k]))
            if not cells:
                continue
            snake = Snake(n, tuple(cells))
            key = snake.key()
            if key not in witnesses:
                witnesses[key] = _pline_from_scaled(n, block[k])
                snakes.append(snake)

    family = SnakeFamily(n, snakes, witnesses)
    _close_under_symmetry(board, family)
    if cache_dir is not None:
        save_family(cache_dir, family)
    return family


def _explicit_perturbed_line(pline: PerturbedLine, delta: Fraction) -> Line:
    """A concrete rational member of the perturbation family at delta."""
    base = pline.base
    t, s = pline.tilt, pline.shift
    if base.is_vertical():
        # x = t*delta*y + v + s*delta^2
        v = base.c / base.a
        return Line.canonical(1, -t * delta, v + s * delta * delta)
    m = base.slope()
    o = base.intercept()
    return Line.from_slope_intercept(m + t * delta, o + s * delta * delta)


def _close_under_symmetry(board: Board, family: SnakeFamily) -> None:
    """Add missing symmetric images with verified witness lines."""
    n = board.n
    added = 0
    pos = 0
    while pos < len(family.snakes):
        snake = family.snakes[pos]
        pos += 1
        for g in DIHEDRAL[1:]:
            image = apply_symmetry(g, snake)
            key = image.key()
            if key in family.witnesses:
                continue
            source = family.witnesses[snake.key()]
            delta = Fraction(1, 1 << 8)
            while True:
                concrete = _explicit_perturbed_line(source, delta)
                if snake_of_line(board, concrete) == snake:
                    moved = apply_symmetry(g, concrete)
                    image_check = snake_of_line(board, moved)
                    if image_check == image:
                        family.witnesses[key] = PerturbedLine(moved, 0, 0)
                        family.snakes.append(image)
                        added += 1
                        break
                delta /= 2
                if delta < Fraction(1, 1 << 80):
                    raise RuntimeError("could not realize symmetric snake")
    family.patched_for_symmetry = added


# --- separation ----------------------------------------------------------------


def separation_oracle(board: Board, weights: WeightGrid) -> SeparationReport:
    """Exact maximization of the snake weight sum over the candidate family."""
    n = board.n
    if weights.n != n:
        raise ValueError("weight grid size mismatch")
    den = weights.common_denominator()
    if kernels.int64_walk_safe(n, 2 * n * n) and den * (2 * n - 1) < 2**60:
        num, line, _, _ = _scan_exact(n, weights, den, cap=1)
        return SeparationReport(line, Fraction(num, den), Fraction(num, den) > 1)
    # arbitrary-precision fallback: vectorized ranges, python-int sums
    best: tuple[Fraction, tuple] | None = None
    numgrid = weights.numerator_grid(den)
    for block in kernels.iter_candidate_blocks(n):
        jlo, jhi, transposed = kernels.pierce_ranges(block, n)
        sums = _object_range_sums(jlo, jhi, transposed, numgrid)
        for k in range(len(block)):
            cand = (Fraction(sums[k], den), tuple(int(v) for v in block[k]))
            if best is None or cand[0] > best[0] or (cand[0] == best[0] and cand[1] < best[1]):
                best = cand
    assert best is not None
    worst = _pline_from_scaled(n, best[1])
    return SeparationReport(worst, best[0], best[0] > 1)


def _scan_exact(n: int, weights: WeightGrid, den: int, cap: int):
    wnum = np.zeros((n, n), dtype=np.int64)
    for (i, j), w in weights.weights.items():
        wnum[i - 1, j - 1] = int(w * den)
    best_sum, best_line, viol_lines, viol_sums = kernels.scan_separation(n, wnum, den, cap)
    return int(best_sum), _pline_from_scaled(n, best_line), viol_lines, viol_sums


def separation_scan_raw(board: Board, wnum: np.ndarray, den: int, cap: int = 64):
    """Exact integer separation scan for quantized weights (internal API).

    Returns (best_sum, best_line_row, violated_lines, violated_sums) with
    sums as numerators over ``den``.
    """
    best_sum, best_line, viol_lines, viol_sums = kernels.scan_separation(
        board.n, np.ascontiguousarray(wnum, dtype=np.int64), den, cap
    )
    return int(best_sum), best_line, viol_lines, viol_sums


def _object_range_sums(jlo, jhi, transposed, numgrid) -> list:
    n = numgrid.shape[0]
    pref = np.zeros((n, n + 1), dtype=object)
    pref[:, 1:] = np.cumsum(numgrid, axis=1)
    pref_t = np.zeros((n, n + 1), dtype=object)
    pref_t[:, 1:] = np.cumsum(numgrid.T, axis=1)
    out = []
    for k in range(jlo.shape[0]):
        p = pref_t if transposed[k] else pref
        total = 0
        for col in range(n):
            lo, hi = int(jlo[k, col]), int(jhi[k, col])
            if lo <= hi:
                total += p[col, hi] - p[col, lo - 1]
        out.append(total)
    return out


def max_cells(board: Board, mode: Literal["pierce", "hit"]) -> tuple[int, PerturbedLine]:
    """Exact maximum of |snake| or |hit set| over the candidate family."""
    n = board.n
    if mode == "pierce":
        count, row = kernels.scan_max_pierce(n)
    elif mode == "hit":
        count, row = kernels.scan_max_hit(n)
    else:
        raise ValueError("mode must be 'pierce' or 'hit'")
    return int(count), _pline_from_scaled(n, row)


# --- hit-set family (for hitting-number searches) -------------------------------


def hit_family(board: Board) -> tuple[list[frozenset], dict[frozenset, Line]]:
    """Distinct hit sets of candidate base lines, with witnesses.

    Every line's hit set is contained in the hit set of a candidate base
    line: a line through no grid vertex hits exactly what it pierces, and
    rotating a line about a vertex it passes through onto a second vertex
    (the first vertex swept) only grows the hit set.  Hence maximal hit
    sets all come from vertex-pair lines, grid lines, or board edges.
    """
    n = board.n
    seen: dict[frozenset, Line] = {}
    order: list[frozenset] = []
    for block in kernels.iter_candidate_blocks(n, with_perturbations=False):
        jlo, jhi, transposed = kernels.hit_ranges(block, n)
        for k in range(len(block)):
            cells = kernels.ranges_to_cells(jlo[k], jhi[k], bool(transposed[k]))
            if not cells:
                continue
            key = frozenset(cells)
            if key not in seen:
                a, b, c = (int(v) for v in block[k, :3])
                seen[key] = Line.from_scaled(n, a, b, c)
                order.append(key)
    return order, seen


# --- cache -----------------------------------------------------------------------


def default_cache_dir() -> Optional[Path]:
    env = os.environ.get("PLANKLINE_CACHE")
    return Path(env) if env else None


def _cache_paths(cache_dir: str | Path, n: int) -> tuple[Path, Path]:
    base = Path(cache_dir) / f"snakes-n{n}-{GENERATOR_VERSION}"
    return base.with_suffix(".txt"), base.with_suffix(".lines.json")


def family_to_text(family: SnakeFamily) -> str:
    keys = sorted(s.key() for s in family.snakes)
    lines = [f"plankline-snakes v1 n={family.n} count={len(keys)}"]
    lines.extend(keys)
    return "\n".join(lines) + "\n"


def family_from_text(text: str) -> tuple[int, list[Snake]]:
    rows = text.splitlines()
    header = rows[0].split()
    if header[0] != "plankline-snakes" or header[1] != "v1":
        raise ValueError(f"unrecognized snake cache header: {rows[0]!r}")
    n = int(header[2].split("=")[1])
    count = int(header[3].split("=")[1])
    snakes = [Snake.from_key(n, row) for row in rows[1:] if row.strip()]
    if len(snakes) != count:
        raise ValueError(f"snake cache count mismatch: header {count}, got {len(snakes)}")
    return n, snakes


def save_family(cache_dir: str | Path, family: SnakeFamily) -> Path:
    txt_path, json_path = _cache_paths(cache_dir, family.n)
    txt_path.parent.mkdir(parents=True, exist_ok=True)
    payload = {
        "generator_version": family.generator_version,
        "patched_for_symmetry": family.patched_for_symmetry,
        "witnesses": {
            key: {
                "a": format_rational(w.base.a),
                "b": format_rational(w.base.b),
                "c": format_rational(w.base.c),
                "tilt": w.tilt,
                "shift": w.shift,
            }
            for key, w in family.witnesses.items()
        },
    }
    for path, data in ((txt_path, family_to_text(family)), (json_path, json.dumps(payload))):
        fd, tmp = tempfile.mkstemp(dir=str(path.parent), prefix=path.name)
        with os.fdopen(fd, "w") as fh:
            fh.write(data)
        os.replace(tmp, path)
    return txt_path


def load_family(cache_dir: str | Path, n: int) -> Optional[SnakeFamily]:
    txt_path, json_path = _cache_paths(cache_dir, n)
    if not (txt_path.exists() and json_path.exists()):
        return None
    n_read, snakes = family_from_text(txt_path.read_text())
    if n_read != n:
        raise ValueError("snake cache n mismatch")
    payload = json.loads(json_path.read_text())
    witnesses = {
        key: PerturbedLine(
            Line.canonical(rational(w["a"]), rational(w["b"]), rational(w["c"])),
            w["tilt"],
            w["shift"],
        )
        for key, w in payload["witnesses"].items()
    }
    if set(witnesses) != {s.key() for s in snakes}:
        raise ValueError("snake cache witnesses out of sync")
    return SnakeFamily(
        n,
        snakes,
        witnesses,
        payload.get("generator_version", GENERATOR_VERSION),
        payload.get("patched_for_symmetry", 0),
    )


def random_scaled_lines(board: Board, count: int, seed: int, coeff: int = 20000) -> np.ndarray:
    """Random integer-coefficient lines anchored near the board, as scaled
    (a, b, c, 0, 0) rows for the batch kernels.  Rational lines in board
    coordinates; coefficients stay far inside the int64 walk budget."""
    rng = np.random.default_rng(seed)
    n = board.n
    lines = np.zeros((count, 5), dtype=np.int64)
    got = 0
    while got < count:
        need = count - got
        a = rng.integers(-coeff, coeff + 1, size=need)
        b = rng.integers(-coeff, coeff + 1, size=need)
        ok = (a != 0) | (b != 0)
        x0 = rng.integers(0, n + 1, size=need)
        y0 = rng.integers(0, n + 1, size=need)
        c = a * x0 + b * y0 + rng.integers(-2 * coeff, 2 * coeff + 1, size=need)
        take = int(ok.sum())
        lines[got : got + take, 0] = a[ok]
        lines[got : got + take, 1] = b[ok]
        lines[got : got + take, 2] = c[ok]
        got += take
    return lines


def random_line_stats(board: Board, count: int, seed: int) -> tuple[np.ndarray, np.ndarray]:
    """(snake sizes, staircase flags) for random rational lines."""
    lines = random_scaled_lines(board, count, seed)
    return kernels.pierce_stats(lines, board.n)
