"""Density certificates: integrals against independent quadrature, the
closed-form cross-checks, weights, and the plank inequality."""

import math
from fractions import Fraction

import numpy as np
import pytest
from scipy.integrate import quad

from plankline.density import (
    MU1,
    MU2,
    Density,
    area_fraction,
    area_integral,
    density_from_json,
    density_to_json,
    line_integral,
    max_line_integral,
    plank_claim_check,
    plank_polygon,
    polygon_integral,
    weights_from_density,
)
from plankline.geometry import Board, DIHEDRAL, Line, apply_symmetry
from plankline.snakes import random_scaled_lines


def test_area_integrals():
    assert area_fraction(MU1) == Fraction(4, 3)
    assert area_integral(MU2) == pytest.approx(1.4039, abs=5e-4)
    one = Density.from_terms([(1, 0, 0)], name="unit")
    assert area_fraction(one) == 4


def test_line_integral_examples():
    assert line_integral(MU1, Line.horizontal(1)) == pytest.approx(1.0, abs=1e-9)
    assert line_integral(MU1, Line.horizontal(0)) == pytest.approx(0.5, abs=1e-9)
    assert line_integral(MU1, Line.from_slope_intercept(1, 0)) == pytest.approx(0.8, abs=1e-9)


def test_line_integral_misses_board():
    assert line_integral(MU1, Line.horizontal(2)) == 0.0
    assert line_integral(MU1, Line.vertical(Fraction(3, 2))) == 0.0


def test_line_integral_against_quadrature():
    rng = np.random.default_rng(12)
    for _ in range(40):
        m = rng.uniform(-3.0, 3.0)
        o = rng.uniform(-1.5, 1.5)
        line = Line.from_slope_intercept(Fraction(m).limit_denominator(997),
                                         Fraction(o).limit_denominator(991))
        got = line_integral(MU2, line)
        fm, fo = float(line.slope()), float(line.intercept())
        if abs(fm) <= 1:
            lo, hi = -1.0, 1.0
            if fm != 0:
                lo = max(lo, min((-1 - fo) / fm, (1 - fo) / fm))
                hi = min(hi, max((-1 - fo) / fm, (1 - fo) / fm))
            if hi <= lo:
                expected = 0.0
            else:
                expected = (1 + abs(fm)) * quad(
                    lambda x: MU2.evaluate(x, fm * x + fo), lo, hi, limit=200,
                    points=[p for p in (0.0, -fo / fm if fm else None) if p is not None],
                )[0]
            assert got == pytest.approx(expected, abs=1e-8)


def test_line_integral_symmetry():
    rng = np.random.default_rng(3)
    for _ in range(20):
        line = Line.from_slope_intercept(
            Fraction(int(rng.integers(-20, 21)), 7), Fraction(int(rng.integers(-10, 11)), 9)
        )
        base = line_integral(MU2, line)
        for g in DIHEDRAL:
            assert line_integral(MU2, apply_symmetry(g, line)) == pytest.approx(base, abs=1e-9)


def test_max1_closed_form():
    # for b <= 1 - a the integral is (3/4)(1+a)(2/3 - 2a^2/15 + 2b^2/3)
    rng = np.random.default_rng(8)
    for _ in range(60):
        a = rng.uniform(0, 1)
        b = rng.uniform(0, max(0.0, 1 - a))
        line = Line.from_slope_intercept(Fraction(a).limit_denominator(10**6),
                                         Fraction(b).limit_denominator(10**6))
        expected = 0.75 * (1 + a) * (2 / 3 - 2 * a**2 / 15 + 2 * b**2 / 3)
        assert line_integral(MU1, line) == pytest.approx(expected, abs=1e-9)


def test_max2_optimal_b_formula():
    # numeric argmax over b in [1-a, 1+a] vs the closed-form optimum
    for a in (0.25, 0.5, 0.75):
        bs = np.linspace(1 - a, 1 + a, 20001)
        vals = [
            line_integral(MU1, Line.from_slope_intercept(
                Fraction(a), Fraction(b).limit_denominator(10**7)))
            for b in bs
        ]
        b_num = bs[int(np.argmax(vals))]
        b_formula = (-1 - a + math.sqrt(9 - 6 * a + 9 * a**2)) / 2
        assert b_num == pytest.approx(b_formula, abs=1e-4)


def test_max_line_integral_mu1():
    value, (a, b) = max_line_integral(MU1, grid=512)
    assert value == pytest.approx(1.0, abs=1e-6)
    assert a == pytest.approx(0.0, abs=1e-6)
    assert b == pytest.approx(1.0, abs=1e-6)


def test_max_line_integral_mu2():
    value, (a, b) = max_line_integral(MU2, grid=512)
    assert value == pytest.approx(0.9971, abs=2e-3)
    assert a == pytest.approx(0.5612, abs=5e-3)
    assert b == pytest.approx(0.5612, abs=5e-3)


def test_max_line_integral_zero_density():
    zero = Density.from_terms([(0, 0, 0)], name="zero")
    value, _ = max_line_integral(zero, grid=64, refine=False)
    assert value == 0.0


def test_weights_mu1_n2():
    w = weights_from_density(MU1, Board(2))
    assert all(v == Fraction(1, 3) for v in w.weights.values())
    assert len(w.weights) == 4


def test_weights_constant_density():
    quarter = Density.from_terms([(Fraction(1, 4), 0, 0)], name="flat")
    for n in (1, 3, 6):
        w = weights_from_density(quarter, Board(n))
        assert all(v == Fraction(1, 2 * n) for v in w.weights.values())


def test_weights_sum_equals_area():
    for dens in (MU1, MU2):
        exact_area = area_fraction(dens)
        for n in (2, 5, 17, 40):
            total = weights_from_density(dens, Board(n)).total()
            assert total == Fraction(n, 2) * exact_area


def test_polygon_integral_vs_area():
    square = [(-1.0, -1.0), (1.0, -1.0), (1.0, 1.0), (-1.0, 1.0)]
    assert polygon_integral(MU1, square) == pytest.approx(4 / 3, abs=1e-12)
    assert polygon_integral(MU2, square) == pytest.approx(float(area_fraction(MU2)), abs=1e-12)


def test_plank_claim_examples():
    zero = Density.from_terms([(0, 0, 0)], name="zero")
    assert plank_claim_check(zero, Board(4), Line.from_slope_intercept(1, Fraction(1, 7))) == 0.0
    slack = plank_claim_check(MU1, Board(10), Line.from_slope_intercept(Fraction(3, 10), Fraction(1, 10)))
    assert slack >= 0.0


def test_plank_claim_random_lines():
    board = Board(10)
    weights = weights_from_density(MU1, board)
    lines = random_scaled_lines(board, 120, seed=4)
    for row in lines:
        a, b, c = (int(v) for v in row[:3])
        line = Line.from_scaled(board.n, a, b, c)
        assert plank_claim_check(MU1, board, line, weights=weights) >= -1e-9


def test_density_json_roundtrip():
    text = density_to_json(MU2)
    back = density_from_json(text)
    assert back.terms == MU2.terms
    assert back.lipschitz_bound == pytest.approx(MU2.lipschitz_bound)


def test_density_validation_rejects_negative():
    with pytest.raises(ValueError):
        Density.from_terms([(-1, 0, 0)], name="neg")


def test_density_lipschitz_bound_covers_sampled_gradient():
    gx, gy = MU1._gradient_grid(500)
    assert MU1.lipschitz_bound >= float(np.hypot(gx, gy).max())
