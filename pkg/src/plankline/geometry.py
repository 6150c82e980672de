"""Exact geometry of lines on the n x n chessboard embedded in [-1,1]^2.

Everything here is decided by exact integer/rational arithmetic; no
floating point enters any piercing or hitting decision.  Internally the
board is rescaled so that cell (i, j) becomes the unit square
[i-1, i] x [j-1, j] inside [0, n]^2, which turns every decision into an
integer sign test.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Iterator, Union

Rational = Fraction
Cell = tuple[int, int]


def rational(value: Union[int, str, Fraction, float]) -> Fraction:
    """Parse a rational from an int, a Fraction, or a 'p/q' string.

    Floats are accepted and converted exactly (binary value), which is
    only appropriate for values that are already exact in binary.
    """
    if isinstance(value, Fraction):
        return value
    if isinstance(value, int):
        return Fraction(value)
    if isinstance(value, str):
        return Fraction(value.strip())
    if isinstance(value, float):
        return Fraction(value)
    raise TypeError(f"cannot interpret {value!r} as a rational")


def format_rational(q: Fraction) -> str:
    """Render as 'p/q' (or plain 'p' for integers), matching the JSON formats."""
    q = Fraction(q)
    if q.denominator == 1:
        return str(q.numerator)
    return f"{q.numerator}/{q.denominator}"


@dataclass(frozen=True)
class Board:
    """The n x n chessboard on [-1,1]^2; cells have side 2/n."""

    n: int

    def __post_init__(self) -> None:
        if self.n < 1:
            raise ValueError("board size must be >= 1")

    def cells(self) -> Iterator[Cell]:
        for i in range(1, self.n + 1):
            for j in range(1, self.n + 1):
                yield (i, j)

    def cell_bounds(self, i: int, j: int) -> tuple[Fraction, Fraction, Fraction, Fraction]:
        """(x0, x1, y0, y1) of the closed cell."""
        n = self.n
        if not (1 <= i <= n and 1 <= j <= n):
            raise ValueError(f"cell ({i},{j}) outside board of size {n}")
        x0 = Fraction(2 * (i - 1), n) - 1
        y0 = Fraction(2 * (j - 1), n) - 1
        return (x0, x0 + Fraction(2, n), y0, y0 + Fraction(2, n))

    def cell_center(self, i: int, j: int) -> tuple[Fraction, Fraction]:
        x0, x1, y0, y1 = self.cell_bounds(i, j)
        return ((x0 + x1) / 2, (y0 + y1) / 2)


@dataclass(frozen=True)
class Line:
    """The locus a*x + b*y = c with exact rational coefficients.

    Instances are canonical: coefficients are coprime integers (stored as
    Fractions) and the first nonzero of (a, b) is positive, so two Line
    objects are equal exactly when they describe the same point set.
    """

    a: Fraction
    b: Fraction
    c: Fraction

    @staticmethod
    def canonical(a, b, c) -> "Line":
        a, b, c = rational(a), rational(b), rational(c)
        if a == 0 and b == 0:
            raise ValueError("degenerate line: a = b = 0")
        lcm = math.lcm(a.denominator, b.denominator, c.denominator)
        ai, bi, ci = int(a * lcm), int(b * lcm), int(c * lcm)
        g = math.gcd(math.gcd(abs(ai), abs(bi)), abs(ci))
        if g:
            ai, bi, ci = ai // g, bi // g, ci // g
        lead = ai if ai != 0 else bi
        if lead < 0:
            ai, bi, ci = -ai, -bi, -ci
        return Line(Fraction(ai), Fraction(bi), Fraction(ci))

    @staticmethod
    def from_slope_intercept(slope, intercept) -> "Line":
        slope, intercept = rational(slope), rational(intercept)
        return Line.canonical(-slope, 1, intercept)

    @staticmethod
    def from_points(p: tuple, q: tuple) -> "Line":
        px, py = rational(p[0]), rational(p[1])
        qx, qy = rational(q[0]), rational(q[1])
        if (px, py) == (qx, qy):
            raise ValueError("need two distinct points")
        a = qy - py
        b = px - qx
        c = a * px + b * py
        return Line.canonical(a, b, c)

    @staticmethod
    def vertical(x) -> "Line":
        return Line.canonical(1, 0, x)

    @staticmethod
    def horizontal(y) -> "Line":
        return Line.canonical(0, 1, y)

    def is_vertical(self) -> bool:
        return self.b == 0

    def slope(self) -> Fraction:
        if self.b == 0:
            raise ValueError("vertical line has no finite slope")
        return -self.a / self.b

    def intercept(self) -> Fraction:
        if self.b == 0:
            raise ValueError("vertical line has no y-intercept")
        return self.c / self.b

    def y_at(self, x) -> Fraction:
        if self.b == 0:
            raise ValueError("vertical line")
        return (self.c - self.a * rational(x)) / self.b

    def eval(self, x, y) -> Fraction:
        return self.a * rational(x) + self.b * rational(y) - self.c

    def scaled_coeffs(self, n: int) -> tuple[int, int, int]:
        """Integer (A, B, C) with A*X + B*Y = C in board coordinates
        X = (x+1)*n/2, Y = (y+1)*n/2 (cells are unit squares in [0,n]^2)."""
        ai, bi, ci = int(self.a), int(self.b), int(self.c)
        return 2 * ai, 2 * bi, n * (ai + bi + ci)

    @staticmethod
    def from_scaled(n: int, a: int, b: int, c: int) -> "Line":
        """Inverse of scaled_coeffs (up to canonical scaling)."""
        return Line.canonical(Fraction(a), Fraction(b), Fraction(2 * c, n) - a - b)

    def __str__(self) -> str:
        return (
            f"{format_rational(self.a)}*x + {format_rational(self.b)}*y"
            f" = {format_rational(self.c)}"
        )


@dataclass(frozen=True)
class PerturbedLine:
    """A line with an optional symbolic perturbation.

    For a non-vertical base y = m*x + o the semantics are the limit, as
    delta -> 0+, of y = (m + tilt*delta)*x + o + shift*delta^2 (the tilt
    term dominates the shift term).  Vertical lines x = v perturb as
    x = tilt*delta*y + v + shift*delta^2.  With tilt = shift = 0 this is
    the base line itself.
    """

    base: Line
    tilt: int = 0
    shift: int = 0

    def __post_init__(self) -> None:
        if self.tilt not in (-1, 0, 1) or self.shift not in (-1, 0, 1):
            raise ValueError("tilt and shift must be in {-1, 0, +1}")


AnyLine = Union[Line, PerturbedLine]


def as_perturbed(line: AnyLine) -> PerturbedLine:
    if isinstance(line, PerturbedLine):
        return line
    return PerturbedLine(line, 0, 0)


def dual_line(s, t) -> Line:
    """Line with normal (s, 1-|s|) and offset t:  s*x + (1-|s|)*y = t."""
    s, t = rational(s), rational(t)
    return Line.canonical(s, 1 - abs(s), t)


# --- the exact walk ---------------------------------------------------------
#
# A symbolic y-value along the perturbed line at abscissa X is
#     (p / q) + tilt * (2X - n) * (delta / 2) + shift * (n/2) * delta^2
# with integers p, q > 0.  Comparisons against integers are lexicographic
# in (p - k*q, tilt-term sign, shift sign).


def _delta_sign(d1: int, s: int) -> int:
    if d1 > 0:
        return 1
    if d1 < 0:
        return -1
    if s > 0:
        return 1
    if s < 0:
        return -1
    return 0


def _jmin_open(p: int, q: int, d1: int, s: int) -> int:
    """Smallest integer j with j > value."""
    fl, rem = divmod(p, q)
    if rem == 0 and _delta_sign(d1, s) < 0:
        return fl
    return fl + 1


def _jmax_open(p: int, q: int, d1: int, s: int) -> int:
    """Largest integer j with j - 1 < value."""
    fl, rem = divmod(p, q)
    if rem != 0:
        return fl + 1
    return fl + 1 if _delta_sign(d1, s) > 0 else fl


def _pierce_columns(a: int, b: int, c: int, tilt: int, shift: int, n: int):
    """Column ranges for a non-vertical scaled line a*X + b*Y = c.

    Yields (i, jlo, jhi) with jlo <= jhi for each column i that contains
    pierced cells, in increasing column order.
    """
    if b < 0:
        a, b, c = -a, -b, -c
    out = []
    for i in range(1, n + 1):
        xl, xr = i - 1, i
        p_l = c - a * xl
        p_r = c - a * xr
        d_l = tilt * (2 * xl - n)
        d_r = tilt * (2 * xr - n)
        if (p_l, d_l) <= (p_r, d_r):
            p_lo, d_lo, p_hi, d_hi = p_l, d_l, p_r, d_r
        else:
            p_lo, d_lo, p_hi, d_hi = p_r, d_r, p_l, d_l
        jlo = max(1, _jmin_open(p_lo, b, d_lo, shift))
        jhi = min(n, _jmax_open(p_hi, b, d_hi, shift))
        if jlo <= jhi:
            out.append((i, jlo, jhi))
    return out


def _hit_columns(a: int, b: int, c: int, n: int):
    """Closed-intersection column ranges for a non-vertical scaled line."""
    if b < 0:
        a, b, c = -a, -b, -c
    out = []
    for i in range(1, n + 1):
        p_l = c - a * (i - 1)
        p_r = c - a * i
        p_lo, p_hi = min(p_l, p_r), max(p_l, p_r)
        # j >= value  and  j - 1 <= value
        jlo = max(1, -((-p_lo) // b))  # ceil(p_lo / b)
        jhi = min(n, p_hi // b + 1)
        if jlo <= jhi:
            out.append((i, jlo, jhi))
    return out


@dataclass(frozen=True)
class Snake:
    """The set of cells pierced by one line, as a sorted tuple of (i, j)."""

    n: int
    cells: tuple[Cell, ...]

    def __post_init__(self) -> None:
        cells = tuple(sorted(set(self.cells)))
        for (i, j) in cells:
            if not (1 <= i <= self.n and 1 <= j <= self.n):
                raise ValueError(f"cell ({i},{j}) outside board of size {self.n}")
        object.__setattr__(self, "cells", cells)

    def __len__(self) -> int:
        return len(self.cells)

    def __contains__(self, cell: Cell) -> bool:
        return cell in set(self.cells)

    def key(self) -> str:
        """Canonical serialization: space-separated 'i,j' pairs, sorted."""
        return " ".join(f"{i},{j}" for i, j in self.cells)

    @staticmethod
    def from_key(n: int, key: str) -> "Snake":
        cells = []
        for tok in key.split():
            i, j = tok.split(",")
            cells.append((int(i), int(j)))
        return Snake(n, tuple(cells))


def snake_of_line(board: Board, line: AnyLine) -> Snake:
    """Cells whose open interior meets the (perturbed) line.  Exact."""
    pline = as_perturbed(line)
    A, B, C = pline.base.scaled_coeffs(board.n)
    cells = _walk_pierce(A, B, C, pline.tilt, pline.shift, board.n)
    return Snake(board.n, tuple(cells))


def _walk_pierce(A: int, B: int, C: int, tilt: int, shift: int, n: int) -> list[Cell]:
    if B == 0:
        # Vertical: x = tilt*delta*y + v + shift*delta^2 is the mirror of the
        # horizontal case, so walk the transposed line and swap indices back.
        cols = _pierce_columns(0, A, C, tilt, shift, n)
        return sorted((i, j) for (j, lo, hi) in cols for i in range(lo, hi + 1))
    cols = _pierce_columns(A, B, C, tilt, shift, n)
    return [(i, j) for (i, lo, hi) in cols for j in range(lo, hi + 1)]


def hit_cells_of_line(board: Board, line: Line) -> frozenset[Cell]:
    """Cells whose closed square meets the line.  Exact."""
    if isinstance(line, PerturbedLine):
        raise TypeError("hit_cells_of_line takes an unperturbed Line")
    A, B, C = line.scaled_coeffs(board.n)
    if B == 0:
        cols = _hit_columns(0, A, C, board.n)
        return frozenset((i, j) for (j, lo, hi) in cols for i in range(lo, hi + 1))
    cols = _hit_columns(A, B, C, board.n)
    return frozenset((i, j) for (i, lo, hi) in cols for j in range(lo, hi + 1))


# --- the dihedral group of the board ----------------------------------------


@dataclass(frozen=True)
class Symmetry:
    """Board symmetry p -> (sx*u, sy*v) where (u, v) = (y, x) if swap else (x, y)."""

    swap: bool
    sx: int
    sy: int

    def point(self, x, y):
        u, v = (y, x) if self.swap else (x, y)
        return (self.sx * u, self.sy * v)

    def cell(self, n: int, cell: Cell) -> Cell:
        i, j = cell
        if self.swap:
            i, j = j, i
        if self.sx < 0:
            i = n + 1 - i
        if self.sy < 0:
            j = n + 1 - j
        return (i, j)


DIHEDRAL = tuple(
    Symmetry(swap, sx, sy)
    for swap in (False, True)
    for sx in (1, -1)
    for sy in (1, -1)
)
IDENTITY = DIHEDRAL[0]


def apply_symmetry(g: Symmetry, obj, n: int | None = None):
    """Apply a board symmetry to a Line or a Snake (conjugation-consistent)."""
    if isinstance(obj, Line):
        # the preimage of q under g is (sy*qy, sx*qx) when swapped
        if g.swap:
            return Line.canonical(obj.b * g.sx, obj.a * g.sy, obj.c)
        return Line.canonical(obj.a * g.sx, obj.b * g.sy, obj.c)
    if isinstance(obj, Snake):
        return Snake(obj.n, tuple(g.cell(obj.n, c) for c in obj.cells))
    raise TypeError(f"cannot apply symmetry to {type(obj).__name__}")
