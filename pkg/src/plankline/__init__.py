"""plankline: certified bounds for piercing/hitting all cells of the n x n
chessboard with straight lines."""

from .geometry import (
    Board,
    Cell,
    Line,
    PerturbedLine,
    Rational,
    Snake,
    apply_symmetry,
    dual_line,
    hit_cells_of_line,
    snake_of_line,
)

__version__ = "0.1.0"

__all__ = [
    "Board",
    "Cell",
    "Line",
    "PerturbedLine",
    "Rational",
    "Snake",
    "apply_symmetry",
    "dual_line",
    "hit_cells_of_line",
    "snake_of_line",
    "__version__",
]
