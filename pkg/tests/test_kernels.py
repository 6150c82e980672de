"""Backend parity: the numba kernels, the numpy fallback, and the
arbitrary-precision python walk must agree cell for cell."""

import numpy as np
import pytest

from plankline import _backend
from plankline.geometry import Board, Line, PerturbedLine, hit_cells_of_line, snake_of_line
from plankline.kernels import npy, ranges_to_cells

jit = pytest.importorskip("plankline.kernels.jit") if _backend.HAVE_NUMBA else None
BACKENDS = [npy] if jit is None else [npy, jit]


def random_scaled_lines(rng, n, count, with_pert=True):
    """Random int64 scaled lines through the board region."""
    lines = np.zeros((count, 5), dtype=np.int64)
    k = 0
    while k < count:
        a = rng.integers(-400, 401)
        b = rng.integers(-400, 401)
        if a == 0 and b == 0:
            continue
        # anchor near the board so most lines meet it
        x0 = rng.integers(0, n + 1)
        y0 = rng.integers(0, n + 1)
        c = a * x0 + b * y0 + rng.integers(-3, 4)
        lines[k, :3] = (a, b, c)
        if with_pert:
            lines[k, 3] = rng.integers(-1, 2)
            lines[k, 4] = rng.integers(-1, 2)
        k += 1
    return lines


def line_from_scaled(n, a, b, c):
    """Unscale a*X + b*Y = c back to board coordinates."""
    from fractions import Fraction

    return Line.canonical(Fraction(a), Fraction(b), Fraction(2 * c, n) - a - b)


@pytest.mark.parametrize("n", [2, 3, 5, 8])
def test_pierce_parity_with_python_walk(n):
    rng = np.random.default_rng(704 + n)
    lines = random_scaled_lines(rng, n, 80)
    board = Board(n)
    results = []
    for impl in BACKENDS:
        jlo, jhi, tr = impl.pierce_ranges(lines, n)
        counts, stair = impl.pierce_stats(lines, n)
        cells = [ranges_to_cells(jlo[k], jhi[k], bool(tr[k])) for k in range(len(lines))]
        assert all(len(cl) == counts[k] for k, cl in enumerate(cells))
        results.append((cells, counts.tolist(), stair.tolist()))
    for got in results[1:]:
        assert got == results[0]
    for k in range(len(lines)):
        a, b, c, t, s = (int(v) for v in lines[k])
        pline = PerturbedLine(line_from_scaled(n, a, b, c), t, s)
        assert list(snake_of_line(board, pline).cells) == results[0][0][k]


@pytest.mark.parametrize("n", [2, 4, 7])
def test_hit_parity_with_python_walk(n):
    rng = np.random.default_rng(9_000 + n)
    lines = random_scaled_lines(rng, n, 60, with_pert=False)
    board = Board(n)
    results = []
    for impl in BACKENDS:
        jlo, jhi, tr = impl.hit_ranges(lines, n)
        cells = [ranges_to_cells(jlo[k], jhi[k], bool(tr[k])) for k in range(len(lines))]
        results.append(cells)
    for got in results[1:]:
        assert got == results[0]
    for k in range(len(lines)):
        a, b, c = (int(v) for v in lines[k, :3])
        got = hit_cells_of_line(board, line_from_scaled(n, a, b, c))
        assert sorted(got) == results[0][k]


@pytest.mark.parametrize("n", [2, 3, 6])
def test_sum_parity(n):
    rng = np.random.default_rng(31 + n)
    lines = random_scaled_lines(rng, n, 120)
    wnum = rng.integers(0, 1000, size=(n, n)).astype(np.int64)
    sums = [impl.pierce_sums(lines, n, wnum) for impl in BACKENDS]
    hsums = [impl.hit_sums(lines[:, :3].copy(), n, wnum) for impl in BACKENDS]
    for got in sums[1:]:
        assert np.array_equal(got, sums[0])
    for got in hsums[1:]:
        assert np.array_equal(got, hsums[0])
    # independent check of one line against the python walk
    board = Board(n)
    for k in range(0, len(lines), 17):
        a, b, c, t, s = (int(v) for v in lines[k])
        snake = snake_of_line(board, PerturbedLine(line_from_scaled(n, a, b, c), t, s))
        expected = sum(int(wnum[i - 1, j - 1]) for (i, j) in snake.cells)
        assert expected == int(sums[0][k])


@pytest.mark.parametrize("n", [2, 3, 5])
def test_scan_parity(n):
    wnum = np.arange(n * n, dtype=np.int64).reshape(n, n) + 1
    den = int(wnum.sum() // 2)
    outs = [impl.scan_separation(n, wnum, den, 64) for impl in BACKENDS]
    for got in outs[1:]:
        assert got[0] == outs[0][0]
        assert np.array_equal(got[1], outs[0][1])
    maxes = [impl.scan_max_pierce(n) for impl in BACKENDS]
    for got in maxes[1:]:
        assert got[0] == maxes[0][0]
        assert np.array_equal(got[1], maxes[0][1])
    assert maxes[0][0] == 2 * n - 1
    hits = [impl.scan_max_hit(n) for impl in BACKENDS]
    for got in hits[1:]:
        assert got[0] == hits[0][0]
        assert np.array_equal(got[1], hits[0][1])
