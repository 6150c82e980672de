"""Dual density: the analytic construction, path integrals, the finite-n
snake weightings, and the discrete dual LP."""

import math

import numpy as np
import pytest

from plankline.bounds import fractional_cover_optimum, lp_dual_bound
from plankline.dualdensity import (
    ARCTAN2,
    AnalyticDualDensity,
    DiscreteDualDensity,
    NuParams,
    discrete_dual_lp,
    dual_density_from_csv,
    dual_density_to_csv,
    nu_condition,
    nu_condition_grid,
    nu_mass_quadrature,
    nu_total_mass,
    phi,
    psi,
    snake_weighting_from_nu,
    window_coverage,
)
from plankline.geometry import Board

P746 = NuParams(0.746, 1e-4)
NU746 = AnalyticDualDensity(P746)


def test_phi_at_zero_exact():
    assert phi(0.0, P746) == 2.0
    assert phi(0.0, NuParams(0.3, 1e-3)) == pytest.approx(2.0, abs=1e-12)


def test_phi_symmetric_and_monotone():
    assert phi(0.3, P746) == phi(-0.3, P746)
    values = [phi(a, P746) for a in np.linspace(0, 1.0, 50)]
    assert all(b >= a - 1e-12 for a, b in zip(values, values[1:]))


def test_phi_against_independent_form():
    # cos-product form vs 8 / (4 - (1-eps)^2 tan^2 alpha)
    for eps in (1e-4, 1e-3, 5e-3):
        params = NuParams(0.5, eps)
        for alpha in np.linspace(-1.05, 1.05, 31):
            direct = phi(float(alpha), params)
            cbar = 1.0 - eps
            simplified = 8.0 / (4.0 - cbar**2 * math.tan(alpha) ** 2)
            assert direct == pytest.approx(simplified, rel=1e-12)


def test_phi_value_at_gamma():
    assert phi(0.746, P746) == pytest.approx(2.5428, abs=1e-3)


def test_phi_domain_error():
    with pytest.raises(ValueError):
        phi(ARCTAN2, P746)
    with pytest.raises(ValueError):
        phi(-1.2, P746)


def test_psi_positive_inside_strip():
    h = P746.h
    for t in np.linspace(-h + 1e-6, h - 1e-6, 41):
        assert psi(float(t), P746) > 0
    assert psi(math.tan(0.746) / 2, P746) == pytest.approx(0.0, abs=1e-4)


def test_nu_condition_center():
    expected = 2.0 - 2.0 / P746.phi_gamma
    assert nu_condition(NU746, 0.0, 0.0) == pytest.approx(expected, abs=1e-8)
    assert expected == pytest.approx(1.21, abs=5e-3)


def test_nu_condition_half_point():
    assert nu_condition(NU746, 0.5, -0.5) == pytest.approx(1.13, abs=5e-3)


def test_nu_condition_wide_angles_covered_by_nu1():
    # |alpha1| + |alpha2| >= 2 gamma: the needle part alone reaches 1
    rng = np.random.default_rng(2)
    hits = 0
    for _ in range(300):
        x0, y0 = rng.uniform(-1, 1, 2)
        a1 = math.atan(abs(x0 + y0))
        a2 = math.atan(abs(x0 - y0))
        if a1 + a2 >= 2 * P746.gamma:
            hits += 1
            assert nu_condition(NU746, x0, y0) >= 1.0 - 1e-9
    assert hits > 10


def test_nu_condition_grid_sweep():
    grid = nu_condition_grid(NU746, 60)
    assert grid.min() >= 1.0 - 1e-6


def test_mass_closed_form():
    mass = nu_total_mass(P746)
    assert mass == pytest.approx(1.8485, abs=1e-3)
    assert mass < 1.849


def test_mass_gamma_zero():
    assert nu_total_mass(NuParams(0.0, 1e-4)) == pytest.approx(2.0, abs=1e-3)


def test_mass_matches_quadrature_random_params():
    rng = np.random.default_rng(9)
    for _ in range(10):
        gamma = float(rng.uniform(0.1, 0.95))
        eps = float(rng.uniform(1e-4, 2e-2))
        params = NuParams(gamma, eps)
        closed = nu_total_mass(params)
        quad = nu_mass_quadrature(AnalyticDualDensity(params))
        assert closed == pytest.approx(quad, abs=1e-6)


def test_minimum_near_paper_gamma():
    masses = {g: nu_total_mass(NuParams(g, 1e-6)) for g in np.arange(0.5, 1.0, 0.002)}
    best = min(masses, key=masses.get)
    assert best == pytest.approx(0.746, abs=5e-3)


# --- snake weighting -----------------------------------------------------------


def test_snake_weighting_small_board():
    board = Board(6)
    sw = snake_weighting_from_nu(NU746, board, slabs_per_needle=8192)
    assert sw.feasible
    assert sw.min_coverage >= 1.0 - 1e-12
    assert sw.total_value == pytest.approx(sum(sw.rho.values()), rel=1e-9)
    assert all(v >= 0 for v in sw.rho.values())


def test_snake_weighting_coverage_matches_window_integrals():
    board = Board(12)
    sw = snake_weighting_from_nu(NU746, board, slabs_per_needle=16384)
    for (i, j) in [(1, 1), (6, 7), (12, 12), (3, 10)]:
        independent = window_coverage(NU746, board, i, j)
        got = sw.coverage[i - 1, j - 1] / sw.safety_scale
        assert got == pytest.approx(independent, abs=2e-3)


def test_snake_weighting_zero_density_flagged():
    zero = DiscreteDualDensity(np.zeros((8, 8)))
    sw = snake_weighting_from_nu(zero, Board(4), safety_scale=1.0)
    assert not sw.feasible
    assert sw.min_coverage == 0.0
    with pytest.raises(ValueError):
        snake_weighting_from_nu(zero, Board(4))


def test_snake_weighting_discrete_uniform():
    uniform = DiscreteDualDensity(np.full((8, 8), 0.5))
    sw = snake_weighting_from_nu(uniform, Board(5), slabs_per_column=256)
    assert sw.feasible
    # mass 2 scaled by n/2 with coverage ~1 gives value ~ n
    assert sw.total_value == pytest.approx(5.0, rel=0.05)


def test_duality_sandwich_small_n():
    for n in (3, 4, 5):
        board = Board(n)
        sw = snake_weighting_from_nu(NU746, board, slabs_per_needle=8192)
        assert sw.feasible
        lp_c = fractional_cover_optimum(board, "pierce")
        cert = lp_dual_bound(board)
        assert sw.total_value >= lp_c - 1e-6
        assert lp_c >= float(cert.bound) - 1e-6


# --- discrete LP ----------------------------------------------------------------


def test_discrete_lp_uniform_feasible_grid4():
    mass, dens = discrete_dual_lp(4, 4)
    assert mass <= 4.0
    grid = nu_condition_grid(dens, 9)
    assert grid.min() >= 1.0 - 1e-9


def test_discrete_lp_beats_paper_threshold_at_12():
    mass, dens = discrete_dual_lp(12, 12)
    assert mass < 1.85
    # re-verify feasibility at the sample resolution
    centers = np.array([-1.0 + (2 * k + 1.0) / 12 for k in range(12)])
    for x0 in centers:
        for y0 in centers:
            assert nu_condition(dens, float(x0), float(y0)) >= 1.0 - 1e-9


def test_discrete_lp_monotone_in_grid():
    m16, _ = discrete_dual_lp(16, 16)
    m8, _ = discrete_dual_lp(8, 16)
    assert m8 >= m16 - 1e-9


def test_csv_roundtrip_byte_identical():
    _, dens = discrete_dual_lp(8, 8)
    text = dual_density_to_csv(dens)
    back = dual_density_from_csv(text)
    assert dual_density_to_csv(back) == text
    assert np.array_equal(back.values, dens.values)


def test_params_validation():
    with pytest.raises(ValueError):
        NuParams(1.5, 1e-4)
    with pytest.raises(ValueError):
        NuParams(0.5, 0.9)
    with pytest.raises(ValueError):
        NuParams(0.999, 0.22)  # h would reach 1
