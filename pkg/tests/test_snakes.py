"""Snake family enumeration, the separation oracle, and the cache format."""

from fractions import Fraction

import numpy as np
import pytest

from plankline.geometry import (
    DIHEDRAL,
    Board,
    Line,
    PerturbedLine,
    Snake,
    apply_symmetry,
    snake_of_line,
)
from plankline.snakes import (
    WeightGrid,
    candidate_count_bound,
    candidate_lines,
    enumerate_snakes,
    family_from_text,
    family_to_text,
    hit_family,
    load_family,
    max_cells,
    random_line_stats,
    save_family,
    separation_oracle,
)


def test_single_cell_board_family():
    family = enumerate_snakes(Board(1))
    assert [s.key() for s in family.snakes] == ["1,1"]


def test_n2_family_contains_all_three_cell_snakes():
    family = enumerate_snakes(Board(2))
    keys = {s.key() for s in family.snakes}
    assert {
        "1,1 1,2 2,1",
        "1,1 1,2 2,2",
        "1,1 2,1 2,2",
        "1,2 2,1 2,2",
    } <= keys


def test_near_diagonal_candidate_realizes_spec_snake():
    family = enumerate_snakes(Board(2))
    assert any(s.key() == "1,1 1,2 2,2" for s in family.snakes)


def test_candidate_family_size_bound():
    for n in (1, 2, 3, 4):
        cands = candidate_lines(Board(n))
        assert len(cands) <= candidate_count_bound(n)
        assert len(cands) == len({(c.base, c.tilt, c.shift) for c in cands})


def test_candidate_count_n1_frozen():
    # frozen output of this generator for the single-cell board
    assert len(candidate_lines(Board(1))) == 44


def test_every_snake_reproduced_by_witness():
    for n in (2, 3, 5):
        board = Board(n)
        family = enumerate_snakes(board)
        for snake in family.snakes:
            witness = family.witnesses[snake.key()]
            assert snake_of_line(board, witness) == snake


def test_family_closed_under_symmetry():
    for n in (2, 3, 4, 6):
        family = enumerate_snakes(Board(n))
        keys = {s.key() for s in family.snakes}
        for snake in family.snakes:
            for g in DIHEDRAL:
                assert apply_symmetry(g, snake).key() in keys


def test_member_sizes_bounded():
    for n in (2, 3, 5, 7):
        family = enumerate_snakes(Board(n))
        assert max(len(s) for s in family.snakes) == 2 * n - 1


@pytest.mark.parametrize("n", [2, 3, 5, 8, 12])
def test_randomized_completeness(n):
    # every random line's snake is contained in some family member
    board = Board(n)
    family = enumerate_snakes(board)
    members = [frozenset(s.cells) for s in family.snakes]
    by_first: dict = {}
    for m in members:
        for cell in m:
            by_first.setdefault(cell, []).append(m)
    from plankline.snakes import random_scaled_lines
    from plankline import kernels

    lines = random_scaled_lines(board, 4000, seed=n)
    jlo, jhi, tr = kernels.pierce_ranges(lines, n)
    for k in range(len(lines)):
        cells = kernels.ranges_to_cells(jlo[k], jhi[k], bool(tr[k]))
        if not cells:
            continue
        cs = frozenset(cells)
        assert any(cs <= m for m in by_first.get(cells[0], [])), cells


def test_separation_uniform_third():
    report = separation_oracle(Board(2), WeightGrid.uniform(2, Fraction(1, 3)))
    assert report.worst_sum == 1
    assert not report.violated


def test_separation_zero_weights():
    report = separation_oracle(Board(3), WeightGrid(3, {}))
    assert report.worst_sum == 0
    assert not report.violated


def test_separation_single_cell():
    report = separation_oracle(Board(2), WeightGrid(2, {(1, 1): Fraction(1)}))
    assert report.worst_sum == 1
    assert (1, 1) in snake_of_line(Board(2), report.worst_line)


def test_separation_object_path_matches_int64_path():
    # a 2^70 denominator forces the arbitrary-precision fallback; the worst
    # sum may shift by at most (2n-1) * 2^-70 against the fast path
    n = 3
    board = Board(n)
    base = WeightGrid(n, {(i, j): Fraction(i * n + j, 13) for i in range(1, 4) for j in range(1, 4)})
    fast = separation_oracle(board, base)
    bumped = WeightGrid(n, {c: v + Fraction(1, 2**70) for c, v in base.weights.items()})
    slow = separation_oracle(board, bumped)
    assert abs(slow.worst_sum - fast.worst_sum) <= Fraction(2 * n - 1, 2**70)
    assert snake_of_line(board, slow.worst_line) == snake_of_line(board, fast.worst_line)


def test_max_cells_examples():
    assert max_cells(Board(5), "pierce")[0] == 9
    assert max_cells(Board(1), "hit")[0] == 1
    assert max_cells(Board(2), "hit")[0] == 4


def test_max_cells_witness_reproduces():
    for n in (2, 4, 6):
        count, witness = max_cells(Board(n), "pierce")
        assert count == 2 * n - 1
        assert len(snake_of_line(Board(n), witness)) == count


def test_max_hit_diagonal_count():
    # closed diagonals meet 3n-2 cells; the true maximum over all lines
    for n in (2, 3, 4, 6):
        count, _ = max_cells(Board(n), "hit")
        from plankline.geometry import hit_cells_of_line

        diag = len(hit_cells_of_line(Board(n), Line.from_slope_intercept(1, 0)))
        assert diag == 3 * n - 2
        assert count >= diag


def test_random_line_stats_bounds():
    counts, stair = random_line_stats(Board(9), 5000, seed=7)
    assert counts.max() <= 17
    assert stair.all()


def test_hit_family_contains_full_cross_sets():
    sets, witnesses = hit_family(Board(2))
    assert frozenset({(1, 1), (1, 2), (2, 1), (2, 2)}) in set(sets)


# --- cache ------------------------------------------------------------------------


def test_cache_text_roundtrip_byte_identical():
    family = enumerate_snakes(Board(3))
    text = family_to_text(family)
    assert text.startswith(f"plankline-snakes v1 n=3 count={len(family)}\n")
    n, snakes = family_from_text(text)
    rebuilt_text = family_to_text(
        type(family)(n, snakes, {s.key(): None for s in snakes})
    )
    assert rebuilt_text == text


def test_cache_save_load(tmp_path):
    family = enumerate_snakes(Board(4), cache_dir=tmp_path)
    loaded = load_family(tmp_path, 4)
    assert loaded is not None
    assert {s.key() for s in loaded.snakes} == {s.key() for s in family.snakes}
    assert loaded.witnesses.keys() == family.witnesses.keys()
    # byte-identical rewrite
    first = (tmp_path / f"snakes-n4-{family.generator_version}.txt").read_bytes()
    save_family(tmp_path, loaded)
    second = (tmp_path / f"snakes-n4-{family.generator_version}.txt").read_bytes()
    assert first == second


def test_cache_bad_header_rejected():
    with pytest.raises(ValueError):
        family_from_text("plankline-snakes v9 n=2 count=0\n")
