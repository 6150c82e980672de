"""Simplex solver and exact certification tests."""

from fractions import Fraction

import numpy as np
import pytest

from plankline.geometry import Board
from plankline.lp import (
    BoundCertificate,
    CertificateParseError,
    CertificateValidationError,
    CertificateVersionError,
    LinearProgram,
    certify_dual_weights,
    solve_lp,
)
from plankline.snakes import WeightGrid


def test_simple_max():
    lp = LinearProgram("max", [1, 1], [[1, 0], [0, 1]], ["<=", "<="], [1, 1])
    sol = solve_lp(lp)
    assert sol.status == "optimal"
    assert sol.value == pytest.approx(2.0)
    assert sol.x == pytest.approx([1.0, 1.0])


def test_infeasible():
    lp = LinearProgram("max", [1], [[1], [1]], ["<=", ">="], [-1, 0])
    assert solve_lp(lp).status == "infeasible"


def test_duplicate_rows_degeneracy():
    lp = LinearProgram("max", [1], [[1], [1]], ["<=", "<="], [1, 1])
    sol = solve_lp(lp)
    assert sol.status == "optimal"
    assert sol.value == pytest.approx(1.0)


def test_unbounded():
    lp = LinearProgram("max", [1, 0], [[0, 1]], ["<="], [1])
    assert solve_lp(lp).status == "unbounded"


def test_min_with_ge_rows():
    # min x + 2y s.t. x + y >= 2, y >= 0.5
    lp = LinearProgram("min", [1, 2], [[1, 1], [0, 1]], [">=", ">="], [2, 0.5])
    sol = solve_lp(lp)
    assert sol.status == "optimal"
    assert sol.value == pytest.approx(2.5)
    assert sol.x == pytest.approx([1.5, 0.5])


def test_equality_rows():
    lp = LinearProgram("max", [3, 2], [[1, 1], [1, -1]], ["=", "="], [4, 2])
    sol = solve_lp(lp)
    assert sol.status == "optimal"
    assert sol.x == pytest.approx([3.0, 1.0])


def test_lower_bounds_shift():
    lp = LinearProgram(
        "min", [1, 1], [[1, 1]], [">="], [4], lower_bounds=np.array([1.0, 2.0])
    )
    sol = solve_lp(lp)
    assert sol.status == "optimal"
    assert sol.value == pytest.approx(4.0)
    assert all(sol.x >= [1.0 - 1e-9, 2.0 - 1e-9])


def test_duals_strong_duality():
    # max c.x, Ax <= b: dual values y satisfy y >= 0 and b.y = optimum
    rng = np.random.default_rng(5)
    A = rng.uniform(0.1, 2.0, size=(6, 4))
    b = rng.uniform(1.0, 3.0, size=6)
    c = rng.uniform(0.1, 1.0, size=4)
    lp = LinearProgram("max", c, A, ["<="] * 6, b)
    sol = solve_lp(lp)
    assert sol.status == "optimal"
    assert sol.duals is not None
    assert (sol.duals >= -1e-9).all()
    assert float(b @ sol.duals) == pytest.approx(sol.value, abs=1e-8)
    # dual feasibility: A^T y >= c
    assert (A.T @ sol.duals >= c - 1e-8).all()


def test_residual_feasibility_of_optimal_solutions():
    rng = np.random.default_rng(11)
    for trial in range(25):
        m, k = rng.integers(2, 7), rng.integers(2, 6)
        A = rng.normal(size=(m, k))
        b = rng.uniform(0.5, 2.0, size=m)
        c = rng.normal(size=k)
        rels = [("<=", ">=", "=")[rng.integers(0, 3)] for _ in range(m)]
        lp = LinearProgram("max", c, A, rels, b)
        sol = solve_lp(lp)
        if sol.status != "optimal":
            continue
        Ax = A @ sol.x
        for i, rel in enumerate(rels):
            if rel == "<=":
                assert Ax[i] <= b[i] + 1e-9
            elif rel == ">=":
                assert Ax[i] >= b[i] - 1e-9
            else:
                assert Ax[i] == pytest.approx(b[i], abs=1e-9)
        assert (sol.x >= -1e-9).all()


# --- certification ------------------------------------------------------------


def test_certify_uniform_third_n2():
    board = Board(2)
    cert = certify_dual_weights(board, WeightGrid.uniform(2, Fraction(1, 3)))
    assert cert.bound == Fraction(4, 3)
    assert cert.worst_sum == 1
    cert.validate()


def test_certify_all_ones_scales():
    board = Board(2)
    cert = certify_dual_weights(board, WeightGrid.uniform(2, 1))
    assert cert.bound == Fraction(4, 3)
    cert.validate()


def test_certify_zero_weights():
    board = Board(3)
    cert = certify_dual_weights(board, WeightGrid(3, {}))
    assert cert.bound == 0
    cert.validate()


def test_certificate_roundtrip_and_tamper():
    board = Board(2)
    cert = certify_dual_weights(board, WeightGrid.uniform(2, Fraction(1, 3)))
    text = cert.to_json()
    back = BoundCertificate.from_json(text)
    assert back.bound == cert.bound
    assert back.witness_weights.weights == cert.witness_weights.weights
    back.validate()

    tampered = text.replace('"bound": "4/3"', '"bound": "3/2"')
    bad = BoundCertificate.from_json(tampered)
    with pytest.raises(CertificateValidationError):
        bad.validate()

    with pytest.raises(CertificateVersionError):
        BoundCertificate.from_json(text.replace("plankline-cert v1", "plankline-cert v9"))

    with pytest.raises(CertificateParseError):
        BoundCertificate.from_json("{not json")
