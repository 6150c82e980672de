"""Explicit covering line families and their exact verification.

The piercing family consists of n-2 parallel lines of slope 1 - 1/n^2
(each passing through a cell center on the antidiagonal band) plus one
closing line through the four cells the parallels miss.  The hitting
family takes every second vertical cell boundary.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from fractions import Fraction
from typing import Literal

from .geometry import (
    Board,
    Cell,
    Line,
    PerturbedLine,
    format_rational,
    hit_cells_of_line,
    rational,
    snake_of_line,
)


@dataclass
class LineFamily:
    n: int
    mode: Literal["pierce", "hit"]
    lines: list[PerturbedLine]
    provenance: str = ""

    def __len__(self) -> int:
        return len(self.lines)


def piercing_family(board: Board) -> LineFamily:
    """n-1 lines piercing every cell (n >= 3), exactly verified.

    The parallels are l_i: y = (1 - eps) x translated by
    (1 - (2i+1)/n, -1 + (2i+1)/n) for i = 1..n-2 with eps = 1/n^2; the
    closing line runs through (-1 + 1/n, 1 - 1/(2n)) and its negative.
    """
    n = board.n
    if n < 3:
        raise ValueError("piercing_family needs n >= 3")
    eps = Fraction(1, n * n)
    slope = 1 - eps
    lines = []
    for i in range(1, n - 1):
        dx = 1 - Fraction(2 * i + 1, n)
        # translate of y = slope*x by (dx, -dx)
        intercept = -dx - slope * dx
        lines.append(PerturbedLine(Line.from_slope_intercept(slope, intercept), 0, 0))
    p = (Fraction(-1) + Fraction(1, n), Fraction(1) - Fraction(1, 2 * n))
    closing = Line.from_points(p, (-p[0], -p[1]))
    lines.append(PerturbedLine(closing, 0, 0))
    family = LineFamily(n, "pierce", lines, "diagonal-band")
    uncovered = verify_family(board, family)
    if uncovered:
        raise AssertionError(
            f"piercing family for n={n} misses {len(uncovered)} cells: {uncovered[:4]}"
        )
    return family


def hitting_family(board: Board) -> LineFamily:
    """ceil(n/2) vertical lines hitting every cell, exactly verified."""
    n = board.n
    lines = [
        PerturbedLine(Line.vertical(Fraction(4 * k - 2, n) - 1), 0, 0)
        for k in range(1, n // 2 + 1)
    ]
    if n % 2 == 1:
        lines.append(PerturbedLine(Line.vertical(1), 0, 0))
    family = LineFamily(n, "hit", lines, "second-boundaries")
    uncovered = verify_family(board, family)
    if uncovered:
        raise AssertionError(f"hitting family for n={n} misses {len(uncovered)} cells")
    return family


def verify_family(board: Board, family: LineFamily) -> list[Cell]:
    """Recompute pierce/hit sets exactly; return the uncovered cells."""
    covered: set[Cell] = set()
    for pline in family.lines:
        if family.mode == "pierce":
            covered.update(snake_of_line(board, pline).cells)
        else:
            covered.update(hit_cells_of_line(board, pline.base))
    return sorted(c for c in board.cells() if c not in covered)


def closing_line(board: Board) -> Line:
    """The closing member of the piercing family (slope -(2n-1)/(2n-2))."""
    n = board.n
    p = (Fraction(-1) + Fraction(1, n), Fraction(1) - Fraction(1, 2 * n))
    return Line.from_points(p, (-p[0], -p[1]))


def family_to_json(family: LineFamily) -> str:
    doc = {
        "n": family.n,
        "mode": family.mode,
        "provenance": family.provenance,
        "lines": [
            {
                "a": format_rational(p.base.a),
                "b": format_rational(p.base.b),
                "c": format_rational(p.base.c),
                "tilt": p.tilt,
                "shift": p.shift,
            }
            for p in family.lines
        ],
    }
    return json.dumps(doc, indent=1, sort_keys=True)


def family_from_json(text: str) -> LineFamily:
    doc = json.loads(text)
    lines = [
        PerturbedLine(
            Line.canonical(rational(d["a"]), rational(d["b"]), rational(d["c"])),
            int(d["tilt"]),
            int(d["shift"]),
        )
        for d in doc["lines"]
    ]
    return LineFamily(int(doc["n"]), doc["mode"], lines, doc.get("provenance", ""))
