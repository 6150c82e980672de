"""Certified LP lower bounds, cover search, and exact minimum covers."""

import math
from fractions import Fraction

import pytest

from plankline.bounds import (
    ResourceGuardError,
    cover_search,
    exact_min_cover,
    fractional_cover_optimum,
    lp_dual_bound,
)
from plankline.geometry import Board, hit_cells_of_line, snake_of_line


def test_bound_n1():
    cert = lp_dual_bound(Board(1))
    assert cert.bound == 1
    cert.validate()


def test_bound_n2_exact_four_thirds():
    cert = lp_dual_bound(Board(2))
    assert cert.bound == Fraction(4, 3)
    assert cert.generator["converged"]
    cert.validate()


def test_small_bounds_frozen():
    # exact certified optima of the weight LP on the full family
    # (cross-validated against the full-family covering LP below)
    expected = {3: Fraction(2), 4: Fraction(44, 17), 5: Fraction(10, 3), 6: Fraction(4)}
    for n, value in expected.items():
        cert = lp_dual_bound(Board(n))
        assert cert.bound == value, (n, cert.bound)
        cert.validate()


def test_bound_matches_covering_lp():
    # strong duality: certified weight-LP bound == covering-LP optimum
    for n in (2, 3, 4, 5):
        cert = lp_dual_bound(Board(n))
        cover = fractional_cover_optimum(Board(n), "pierce")
        assert float(cert.bound) == pytest.approx(cover, abs=1e-6)


def test_master_monotone_over_rounds():
    cert = lp_dual_bound(Board(5))
    history = cert.generator["master_history"]
    assert all(a >= b - 1e-9 for a, b in zip(history, history[1:]))


def test_uniform_weight_floor():
    # uniform weights 1/(2n-1) are always feasible, so M_n >= n^2/(2n-1)
    for n in (4, 5, 6, 7):
        cert = lp_dual_bound(Board(n))
        assert cert.bound >= Fraction(n * n, 2 * n - 1)
        assert cert.bound >= Fraction(n, 2)


def test_weak_duality_all_small_n():
    for n in (2, 3, 4, 5):
        cert = lp_dual_bound(Board(n))
        p_n, _ = exact_min_cover(Board(n), "pierce")
        assert cert.bound <= p_n
        assert math.ceil(cert.bound) <= p_n


# --- cover search -------------------------------------------------------------


def test_cover_n2_pierce():
    assert cover_search(Board(2), "pierce", 2).feasible
    assert not cover_search(Board(2), "pierce", 1).feasible


def test_cover_witness_revalidates():
    result = cover_search(Board(4), "pierce", 3)
    assert result.feasible
    covered = set()
    for pline in result.witness:
        covered |= set(snake_of_line(Board(4), pline).cells)
    assert covered == set(Board(4).cells())


def test_cover_hit_witness_revalidates():
    result = cover_search(Board(4), "hit", 2)
    assert result.feasible
    covered = set()
    for pline in result.witness:
        covered |= hit_cells_of_line(Board(4), pline.base)
    assert covered == set(Board(4).cells())


def test_cover_n6_k4_infeasible():
    result = cover_search(Board(6), "pierce", 4)
    assert not result.feasible


def test_exact_min_cover_pierce_values():
    assert exact_min_cover(Board(2), "pierce")[0] == 2
    assert exact_min_cover(Board(3), "pierce")[0] == 2
    assert exact_min_cover(Board(4), "pierce")[0] == 3
    assert exact_min_cover(Board(5), "pierce")[0] == 4


def test_exact_min_cover_hit_values():
    for n in (1, 2, 3, 4, 5):
        value, witness = exact_min_cover(Board(n), "hit")
        assert value == (n + 1) // 2
        covered = set()
        for pline in witness:
            covered |= hit_cells_of_line(Board(n), pline.base)
        assert covered == set(Board(n).cells())


def test_sandwich_certified_vs_construction():
    for n in (3, 4, 5, 6):
        cert = lp_dual_bound(Board(n))
        p_n, _ = exact_min_cover(Board(n), "pierce")
        assert cert.bound <= p_n <= n - 1


def test_guard_trips():
    with pytest.raises(ResourceGuardError):
        exact_min_cover(Board(9), "pierce", guard=7)


def test_bound_nonconverged_still_validates():
    cert = lp_dual_bound(Board(4), max_rounds=1)
    assert not cert.generator["converged"]
    cert.validate()
    assert cert.bound <= Fraction(44, 17)
