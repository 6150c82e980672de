"""Linear programming: a dense two-phase simplex solver and exact-rational
certification of dual-feasible cell weights.

The float simplex is never trusted on its own; every published bound goes
through certify_dual_weights, which re-checks feasibility with exact
integer arithmetic and scales the weights into exact feasibility.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Literal, Optional, Sequence, Union

import numpy as np

from . import kernels
from .geometry import Board, Line, PerturbedLine, Snake, format_rational, rational
from .snakes import (
    SMALL_BOARD,
    SeparationReport,
    WeightGrid,
    enumerate_snakes,
    separation_oracle,
    separation_scan_raw,
)

Relation = Literal["<=", ">=", "="]

DEFAULT_MAX_ITER = 10**6
BLAND_AFTER = 40
PIV_TOL = 1e-9
OPT_TOL = 1e-9
FEAS_TOL = 1e-7


@dataclass
class LinearProgram:
    """min/max c.x subject to rows (A, rel, b) and x >= lower_bounds."""

    sense: Literal["min", "max"]
    objective: np.ndarray
    matrix: np.ndarray
    relations: list[str]
    rhs: np.ndarray
    lower_bounds: Optional[np.ndarray] = None

    def __post_init__(self) -> None:
        self.objective = np.asarray(self.objective, dtype=np.float64)
        self.matrix = np.asarray(self.matrix, dtype=np.float64)
        self.rhs = np.asarray(self.rhs, dtype=np.float64)
        if self.matrix.ndim != 2:
            raise ValueError("matrix must be 2-D")
        m, k = self.matrix.shape
        if len(self.objective) != k or len(self.rhs) != m or len(self.relations) != m:
            raise ValueError("inconsistent LP dimensions")
        if self.sense not in ("min", "max"):
            raise ValueError("sense must be 'min' or 'max'")
        for rel in self.relations:
            if rel not in ("<=", ">=", "="):
                raise ValueError(f"unknown relation {rel!r}")
        if self.lower_bounds is not None:
            self.lower_bounds = np.asarray(self.lower_bounds, dtype=np.float64)
            if len(self.lower_bounds) != k:
                raise ValueError("lower bound length mismatch")
        if not (np.isfinite(self.matrix).all() and np.isfinite(self.rhs).all()
                and np.isfinite(self.objective).all()):
            raise ValueError("LP coefficients must be finite")


@dataclass
class LpSolution:
    status: Literal["optimal", "infeasible", "unbounded", "iteration-limit"]
    x: Optional[np.ndarray]
    value: Optional[float]
    iterations: int
    duals: Optional[np.ndarray] = None


def solve_lp(lp: LinearProgram, max_iterations: int = DEFAULT_MAX_ITER) -> LpSolution:
    """Two-phase dense simplex; deterministic for the fixed pivot rule."""
    m, k = lp.matrix.shape
    lb = lp.lower_bounds if lp.lower_bounds is not None else np.zeros(k)
    b = lp.rhs - lp.matrix @ lb
    shift_const = float(lp.objective @ lb)
    c = lp.objective.copy() if lp.sense == "min" else -lp.objective

    flip = b < 0
    A = np.where(flip[:, None], -lp.matrix, lp.matrix)
    b = np.abs(b)
    flip_rel = {"<=": ">=", ">=": "<=", "=": "="}
    rels = [flip_rel[r] if f else r for r, f in zip(lp.relations, flip)]

    n_slack = sum(1 for r in rels if r == "<=")
    n_surp = sum(1 for r in rels if r == ">=")
    n_art = sum(1 for r in rels if r in (">=", "="))
    ncols = k + n_slack + n_surp + n_art
    T = np.zeros((m, ncols + 1))
    T[:, :k] = A
    T[:, ncols] = b
    basis = np.zeros(m, dtype=np.int64)
    init_col = np.zeros(m, dtype=np.int64)
    art_cols = []
    s_pos, p_pos, a_pos = k, k + n_slack, k + n_slack + n_surp
    for i, rel in enumerate(rels):
        if rel == "<=":
            T[i, s_pos] = 1.0
            basis[i] = s_pos
            init_col[i] = s_pos
            s_pos += 1
        elif rel == ">=":
            T[i, p_pos] = -1.0
            p_pos += 1
            T[i, a_pos] = 1.0
            basis[i] = a_pos
            init_col[i] = a_pos
            art_cols.append(a_pos)
            a_pos += 1
        else:
            T[i, a_pos] = 1.0
            basis[i] = a_pos
            init_col[i] = a_pos
            art_cols.append(a_pos)
            a_pos += 1
    art_mask = np.zeros(ncols + 1, dtype=bool)
    art_mask[art_cols] = True

    iterations = 0
    if art_cols:
        cost1 = np.zeros(ncols + 1)
        cost1[art_cols] = 1.0
        for i in range(m):
            if art_mask[basis[i]]:
                cost1 -= T[i]
        allowed = np.ones(ncols + 1, dtype=bool)
        status, it1 = kernels.simplex_iterate(
            T, cost1, basis, allowed, PIV_TOL, OPT_TOL, max_iterations, BLAND_AFTER
        )
        iterations += it1
        if status == 2:
            return LpSolution("iteration-limit", None, None, iterations)
        if -cost1[ncols] > FEAS_TOL:
            return LpSolution("infeasible", None, None, iterations)
        # drive any residual artificials out of the basis where possible
        for i in range(m):
            if art_mask[basis[i]]:
                for j in range(ncols):
                    if not art_mask[j] and abs(T[i, j]) > 1e-7:
                        _pivot(T, basis, i, j)
                        break

    cost = np.zeros(ncols + 1)
    cost[:k] = c
    for i in range(m):
        bj = basis[i]
        if bj < k and c[bj] != 0.0:
            cost -= c[bj] * T[i]
    allowed = ~art_mask
    status, it2 = kernels.simplex_iterate(
        T, cost, basis, allowed, PIV_TOL, OPT_TOL, max_iterations - iterations, BLAND_AFTER
    )
    iterations += it2
    if status == 2:
        return LpSolution("iteration-limit", None, None, iterations)
    if status == 1:
        return LpSolution("unbounded", None, None, iterations)

    x_ext = np.zeros(ncols)
    for i in range(m):
        if basis[i] < ncols:
            x_ext[basis[i]] = T[i, ncols]
    x = x_ext[:k] + lb
    value = float(lp.objective @ x)

    duals_int = np.array([-cost[init_col[i]] for i in range(m)])
    duals_int[flip] = -duals_int[flip]
    duals = duals_int if lp.sense == "min" else -duals_int
    return LpSolution("optimal", x, value, iterations, duals)


def _pivot(T: np.ndarray, basis: np.ndarray, row: int, col: int) -> None:
    T[row] /= T[row, col]
    factors = T[:, col].copy()
    factors[row] = 0.0
    T -= factors[:, None] * T[row][None, :]
    basis[row] = col


# --- certificates -----------------------------------------------------------------

CERT_VERSION = "plankline-cert v1"


class CertificateError(Exception):
    pass


class CertificateParseError(CertificateError):
    pass


class CertificateVersionError(CertificateError):
    pass


class CertificateValidationError(CertificateError):
    pass


@dataclass
class BoundCertificate:
    """A self-contained, exactly re-checkable bound on p_n or h_n.

    Lower bounds carry dual-feasible cell weights (worst snake sum <= 1
    exactly, bound = total weight).  Upper bounds carry a covering line
    family for the stated mode.
    """

    n: int
    kind: Literal["lower", "upper"]
    bound: Fraction
    witness_weights: Optional[WeightGrid] = None
    witness_lines: Optional[list[PerturbedLine]] = None
    mode: str = "pierce"
    worst_sum: Optional[Fraction] = None
    generator: dict = field(default_factory=dict)

    def to_json(self) -> str:
        if self.kind == "lower":
            witness = {
                f"{i},{j}": format_rational(w)
                for (i, j), w in sorted(self.witness_weights.weights.items())
                if w != 0
            }
        else:
            witness = {
                "mode": self.mode,
                "lines": [_pline_json(p) for p in self.witness_lines],
            }
        doc = {
            "version": CERT_VERSION,
            "n": self.n,
            "kind": self.kind,
            "bound": format_rational(self.bound),
            "witness": witness,
            "generator": self.generator,
            "worst_sum": format_rational(self.worst_sum) if self.worst_sum is not None else None,
        }
        return json.dumps(doc, indent=1, sort_keys=True)

    @staticmethod
    def from_json(text: str) -> "BoundCertificate":
        try:
            doc = json.loads(text)
            version = doc["version"]
        except (json.JSONDecodeError, TypeError, KeyError) as exc:
            raise CertificateParseError(f"not a certificate: {exc}") from exc
        if version != CERT_VERSION:
            raise CertificateVersionError(f"unsupported certificate version {version!r}")
        try:
            n = int(doc["n"])
            kind = doc["kind"]
            bound = rational(doc["bound"])
            worst = rational(doc["worst_sum"]) if doc.get("worst_sum") else None
            if kind == "lower":
                weights = {}
                for key, val in doc["witness"].items():
                    i, j = key.split(",")
                    weights[(int(i), int(j))] = rational(val)
                return BoundCertificate(
                    n, "lower", bound, witness_weights=WeightGrid(n, weights),
                    worst_sum=worst, generator=doc.get("generator", {}),
                )
            if kind == "upper":
                lines = [_pline_from_json(item) for item in doc["witness"]["lines"]]
                return BoundCertificate(
                    n, "upper", bound, witness_lines=lines,
                    mode=doc["witness"].get("mode", "pierce"),
                    worst_sum=worst, generator=doc.get("generator", {}),
                )
            raise KeyError(f"kind {kind!r}")
        except (KeyError, ValueError, TypeError) as exc:
            raise CertificateParseError(f"malformed certificate: {exc}") from exc

    def validate(self) -> None:
        """Exact re-validation; raises CertificateValidationError on failure."""
        board = Board(self.n)
        if self.kind == "lower":
            report = separation_oracle(board, self.witness_weights)
            if report.worst_sum > 1:
                raise CertificateValidationError(
                    f"witness weights violate a line constraint: {report.worst_sum} > 1"
                )
            total = self.witness_weights.total()
            if total < self.bound:
                raise CertificateValidationError(
                    f"stated bound {self.bound} exceeds witness total {total}"
                )
            return
        from .constructions import LineFamily, verify_family  # local import, no cycle

        family = LineFamily(self.n, self.mode, list(self.witness_lines), "certificate")
        uncovered = verify_family(board, family)
        if uncovered:
            raise CertificateValidationError(f"witness lines leave {len(uncovered)} cells uncovered")
        if Fraction(len(self.witness_lines)) != self.bound:
            raise CertificateValidationError("upper bound does not equal witness family size")


def _pline_json(p: PerturbedLine) -> dict:
    return {
        "a": format_rational(p.base.a),
        "b": format_rational(p.base.b),
        "c": format_rational(p.base.c),
        "tilt": p.tilt,
        "shift": p.shift,
    }


def _pline_from_json(doc: dict) -> PerturbedLine:
    return PerturbedLine(
        Line.canonical(rational(doc["a"]), rational(doc["b"]), rational(doc["c"])),
        int(doc["tilt"]),
        int(doc["shift"]),
    )


CERT_QUANT_BITS = 44


def certify_dual_weights(board: Board, weights: WeightGrid,
                         generator: Optional[dict] = None,
                         quantize_bits: int = CERT_QUANT_BITS) -> BoundCertificate:
    """Certified lower bound from nonnegative cell weights.

    The exact separation oracle gives worst_sum; the certificate stores the
    weights scaled by 1/max(worst_sum, 1), which satisfy every candidate
    line constraint exactly, so bound = total(scaled weights) <= p_n.

    Weights whose common denominator would overflow the fast exact scan are
    first floor-rounded to multiples of 2**-quantize_bits (the certificate
    then witnesses the rounded weights; the bound drops by < n^2/2**bits).
    """
    n = board.n
    den = weights.common_denominator()
    quantized = False
    if not (kernels.int64_walk_safe(n, 2 * n * n) and den * (2 * n - 1) < 2**60):
        weights, _ = weights.quantized(quantize_bits)
        quantized = True
    report = separation_oracle(board, weights)
    worst = report.worst_sum
    scale = Fraction(1) / max(worst, Fraction(1))
    scaled = WeightGrid(n, {cell: w * scale for cell, w in weights.weights.items()})
    bound = scaled.total()
    meta = {"method": "certify_dual_weights", "quantized": quantized}
    if generator:
        meta.update(generator)
    return BoundCertificate(
        n, "lower", bound,
        witness_weights=scaled,
        worst_sum=worst * scale,
        generator=meta,
    )
