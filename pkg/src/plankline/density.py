"""Primal density certificates: densities on [-1,1]^2 built from
sign-symmetric monomials c * |x|^p * |y|^q, their line/area integrals,
the global line-integral maximum, LP_d weights, and the plank inequality
check that connects discrete weights to the continuous certificate.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache
from typing import Optional, Sequence

import numpy as np
from numpy.polynomial.legendre import leggauss
from scipy.optimize import minimize

from . import kernels
from .geometry import Board, Line, format_rational, rational, snake_of_line
from .snakes import WeightGrid

Term = tuple[Fraction, int, int]

GRID_CHECK = 1000


@dataclass(frozen=True)
class Density:
    """mu(x, y) = sum of c * |x|^p * |y|^q, nonnegative on the board.

    lipschitz_bound is a closed-form upper bound for sup ||grad mu||_2
    derived from the coefficients (sum of |c|*p per axis); construction
    verifies nonnegativity and the bound against a sampled grid.
    """

    terms: tuple[Term, ...]
    lipschitz_bound: float
    name: str = ""

    def __post_init__(self) -> None:
        vals = self.evaluate_grid(GRID_CHECK)
        if vals.min() < 0:
            raise ValueError(f"density {self.name!r} negative on the board (min {vals.min()})")
        gx, gy = self._gradient_grid(GRID_CHECK)
        sampled = float(np.hypot(gx, gy).max())
        if self.lipschitz_bound < sampled:
            raise ValueError(
                f"lipschitz_bound {self.lipschitz_bound} below sampled gradient {sampled}"
            )

    @staticmethod
    def from_terms(terms: Sequence[tuple], name: str = "") -> "Density":
        parsed = tuple((rational(c), int(p), int(q)) for c, p, q in terms)
        bx = sum(abs(c) * p for c, p, _ in parsed)
        by = sum(abs(c) * q for c, _, q in parsed)
        bound = math.hypot(float(bx), float(by)) * (1 + 1e-12)
        return Density(parsed, bound, name)

    def evaluate(self, x: float, y: float) -> float:
        ax, ay = abs(x), abs(y)
        return sum(float(c) * ax**p * ay**q for c, p, q in self.terms)

    def evaluate_grid(self, m: int) -> np.ndarray:
        xs = np.abs(np.linspace(-1, 1, m))
        out = np.zeros((m, m))
        for c, p, q in self.terms:
            out += float(c) * np.outer(xs**p, xs**q)
        return out

    def _gradient_grid(self, m: int) -> tuple[np.ndarray, np.ndarray]:
        xs = np.linspace(-1, 1, m)
        ax = np.abs(xs)
        gx = np.zeros((m, m))
        gy = np.zeros((m, m))
        for c, p, q in self.terms:
            fc = float(c)
            if p:
                gx += fc * p * np.outer(np.sign(xs) * ax ** (p - 1), ax**q)
            if q:
                gy += fc * q * np.outer(ax**p, np.sign(xs) * ax ** (q - 1))
        return gx, gy

    def swapped(self) -> "Density":
        return Density(
            tuple((c, q, p) for c, p, q in self.terms), self.lipschitz_bound, self.name + "^T"
        )

    def coef_arrays(self) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
        return (
            np.array([float(c) for c, _, _ in self.terms]),
            np.array([p for _, p, _ in self.terms], dtype=np.int64),
            np.array([q for _, _, q in self.terms], dtype=np.int64),
        )


MU1 = Density.from_terms(
    [(Fraction(3, 4), 2, 0), (Fraction(-3, 2), 2, 2), (Fraction(3, 4), 0, 2)], name="mu1"
)

MU2 = Density.from_terms(
    [
        (Fraction(3, 10), 1, 0),
        (Fraction(3, 10), 0, 1),
        (Fraction(43, 100), 3, 0),
        (Fraction(43, 100), 0, 3),
        (Fraction(-117, 200), 3, 1),
        (Fraction(-117, 200), 1, 3),
        (Fraction(-4, 25), 2, 2),
    ],
    name="mu2",
)

BUILTINS = {"mu1": MU1, "mu2": MU2}


# --- integrals -------------------------------------------------------------------


def area_fraction(d: Density) -> Fraction:
    """Exact integral over [-1,1]^2 (monomials integrate in closed form)."""
    return sum(
        (c * Fraction(2, p + 1) * Fraction(2, q + 1) for c, p, q in d.terms), Fraction(0)
    )


def area_integral(d: Density) -> float:
    return float(area_fraction(d))


def line_integral(d: Density, line: Line) -> float:
    """Integral of the density along the line within the board, against the
    l1 length element d(|x| + |y|).  Closed form per monomial."""
    if line.is_vertical():
        v = line.c / line.a
        if abs(v) > 1:
            return 0.0
        fv = abs(float(v))
        return sum(float(c) * fv**p * 2.0 / (q + 1) for c, p, q in d.terms)
    m = line.slope()
    o = line.intercept()
    if abs(m) > 1:
        swapped = Line.canonical(line.b, line.a, line.c)
        return line_integral(d.swapped(), swapped)
    # sign symmetries of |x|,|y| monomials: I(m, o) = I(|m|, |o|)
    a, b = abs(float(m)), abs(float(o))
    coefs, pxs, pys = d.coef_arrays()
    out = kernels.density_line_integrals(
        coefs, pxs, pys, np.array([a]), np.array([b])
    )
    return float(out[0])


def max_line_integral(
    d: Density, grid: int = 2048, refine: bool = True
) -> tuple[float, tuple[float, float]]:
    """Global maximum of the line integral over all lines meeting the board.

    The sign symmetries of monomial densities reduce the search to slopes
    a in [0, 1] and intercepts b in [0, 1 + a]; slopes above 1 are scanned
    against the swapped density.  Grid scan plus Nelder-Mead refinement.
    """
    best_val = 0.0
    best_ab = (0.0, 0.0)
    best_dens = d
    for dens in (d, d.swapped()):
        coefs, pxs, pys = dens.coef_arrays()
        a_axis = np.linspace(0.0, 1.0, grid)
        ratio = np.linspace(0.0, 1.0, grid)
        chunk = max(1, (1 << 22) // grid)
        for start in range(0, grid, chunk):
            a_block = a_axis[start : start + chunk]
            A, R = np.meshgrid(a_block, ratio, indexing="ij")
            B = R * (1.0 + A)
            vals = kernels.density_line_integrals(
                coefs, pxs, pys, A.ravel(), B.ravel()
            )
            k = int(np.argmax(vals))
            if vals[k] > best_val:
                best_val = float(vals[k])
                best_ab = (float(A.ravel()[k]), float(B.ravel()[k]))
                best_dens = dens
    if refine:
        coefs, pxs, pys = best_dens.coef_arrays()

        def neg(z):
            a = min(max(z[0], 0.0), 1.0)
            b = min(max(z[1], 0.0), 1.0 + a)
            return -float(
                kernels.density_line_integrals(coefs, pxs, pys, np.array([a]), np.array([b]))[0]
            )

        res = minimize(neg, np.array(best_ab), method="Nelder-Mead",
                       options={"xatol": 1e-9, "fatol": 1e-12, "maxiter": 400})
        if -res.fun > best_val:
            best_val = float(-res.fun)
            a = min(max(res.x[0], 0.0), 1.0)
            best_ab = (a, min(max(res.x[1], 0.0), 1.0 + a))
    return best_val, best_ab


@lru_cache(maxsize=32)
def _axis_antiderivatives(n: int, p: int) -> tuple:
    """Exact per-cell integrals of |x|^p over the n columns."""
    def prim(x: Fraction) -> Fraction:
        return (1 if x >= 0 else -1) * abs(x) ** (p + 1) / Fraction(p + 1)

    edges = [Fraction(2 * k, n) - 1 for k in range(n + 1)]
    return tuple(prim(edges[k + 1]) - prim(edges[k]) for k in range(n))


def weights_from_density(d: Density, board: Board) -> WeightGrid:
    """w_ij = (n/2) * integral of the density over cell (i, j), exact."""
    n = board.n
    cols: dict[int, tuple] = {}
    for _, p, q in d.terms:
        cols.setdefault(p, _axis_antiderivatives(n, p))
        cols.setdefault(q, _axis_antiderivatives(n, q))
    half_n = Fraction(n, 2)
    weights = {}
    for i in range(n):
        for j in range(n):
            w = sum(
                (c * cols[p][i] * cols[q][j] for c, p, q in d.terms), Fraction(0)
            )
            if w:
                weights[(i + 1, j + 1)] = w * half_n
    return WeightGrid(n, weights)


# --- polygon quadrature and the plank inequality -----------------------------------


def _clip_halfplane(poly: list, a: float, b: float, c: float) -> list:
    """Keep the part of the polygon with a*x + b*y <= c."""
    if not poly:
        return []
    out = []
    m = len(poly)
    for k in range(m):
        x1, y1 = poly[k]
        x2, y2 = poly[(k + 1) % m]
        f1 = a * x1 + b * y1 - c
        f2 = a * x2 + b * y2 - c
        if f1 <= 0:
            out.append((x1, y1))
        if (f1 < 0 < f2) or (f2 < 0 < f1):
            t = f1 / (f1 - f2)
            out.append((x1 + t * (x2 - x1), y1 + t * (y2 - y1)))
    return out


_GAUSS_X, _GAUSS_W = leggauss(6)
_GAUSS_X = (_GAUSS_X + 1.0) / 2.0
_GAUSS_W = _GAUSS_W / 2.0


def _triangle_integral(d: Density, v0, v1, v2) -> float:
    """Exact (to quadrature order 11) integral of the density polynomial
    over a triangle lying inside one quadrant."""
    e1 = (v1[0] - v0[0], v1[1] - v0[1])
    e2 = (v2[0] - v1[0], v2[1] - v1[1])
    jac = abs(e1[0] * (v2[1] - v0[1]) - e1[1] * (v2[0] - v0[0]))
    if jac == 0.0:
        return 0.0
    total = 0.0
    for iu, u in enumerate(_GAUSS_X):
        wu = _GAUSS_W[iu]
        for it, t in enumerate(_GAUSS_X):
            x = v0[0] + u * e1[0] + u * t * e2[0]
            y = v0[1] + u * e1[1] + u * t * e2[1]
            total += wu * _GAUSS_W[it] * u * d.evaluate(x, y)
    return total * jac


def polygon_integral(d: Density, poly: list) -> float:
    """Integral of the density over a convex polygon (split at the axes so
    each piece is a polynomial patch)."""
    total = 0.0
    for qx in (1.0, -1.0):
        for qy in (1.0, -1.0):
            piece = _clip_halfplane(poly, -qx, 0.0, 0.0)
            piece = _clip_halfplane(piece, 0.0, -qy, 0.0)
            if len(piece) < 3:
                continue
            for k in range(1, len(piece) - 1):
                total += _triangle_integral(d, piece[0], piece[k], piece[k + 1])
    return total


def plank_polygon(board: Board, line: Line) -> list:
    """P(line): the l_infinity plank of half-width 1/n around the line,
    clipped to the enlarged square [-1-2/n, 1+2/n]^2."""
    n = board.n
    a, b, c = float(line.a), float(line.b), float(line.c)
    norm1 = abs(a) + abs(b)
    r = 1.0 + 2.0 / n
    poly = [(-r, -r), (r, -r), (r, r), (-r, r)]
    poly = _clip_halfplane(poly, a, b, c + norm1 / n)
    poly = _clip_halfplane(poly, -a, -b, -(c - norm1 / n))
    return poly


def plank_claim_check(
    d: Density,
    board: Board,
    line: Line,
    weights: Optional[WeightGrid] = None,
) -> float:
    """Slack of the plank inequality for one line:

        (n/2) * integral over P(line) + 34*lambda/n  -  sum of snake weights.

    Nonnegative for every line when the weights come from the density.
    """
    n = board.n
    if weights is None:
        weights = weights_from_density(d, board)
    snake = snake_of_line(board, line)
    lhs = float(sum(weights.get(i, j) for (i, j) in snake.cells))
    poly = plank_polygon(board, line)
    rhs = 0.5 * n * polygon_integral(d, poly) + 34.0 * d.lipschitz_bound / n
    return rhs - lhs


# --- density JSON ------------------------------------------------------------------


def density_to_json(d: Density) -> str:
    return json.dumps(
        {
            "name": d.name,
            "terms": [[format_rational(c), p, q] for c, p, q in d.terms],
        },
        indent=1,
    )


def density_from_json(text: str) -> Density:
    doc = json.loads(text)
    return Density.from_terms(
        [(rational(c), int(p), int(q)) for c, p, q in doc["terms"]],
        name=doc.get("name", ""),
    )
