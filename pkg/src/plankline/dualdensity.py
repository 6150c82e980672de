"""Dual densities on the (s, t) line-parameter square.

Lines meeting the board are parameterized by l(s, t): s*x + (1-|s|)*y = t
with s, t in [-1, 1].  A nonnegative density nu(s, t) whose path integrals

    int_{-1}^0 nu(s, y0 + s(x0+y0)) ds + int_0^1 nu(s, y0 + s(x0-y0)) ds

are >= 1 at every board point (x0, y0) turns, after scaling by n/2, into a
feasible fractional covering of the cells by snakes, upper-bounding what
the dual weight LP can certify.

Two flavors: the analytic construction (four slanted needles P1..P4 of
constant density w/eps plus two vertical strips P5, P6 carrying psi(t)/eps)
and arbitrary discrete grid densities.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Optional, Union

import numpy as np

from . import kernels
from .geometry import Board, Line, dual_line
from .lp import LinearProgram, solve_lp

ARCTAN2 = math.atan(2.0)


@dataclass(frozen=True)
class NuParams:
    """Parameters of the analytic dual density."""

    gamma: float
    epsilon: float

    def __post_init__(self) -> None:
        if not (0.0 <= self.gamma <= 1.0):
            raise ValueError("gamma must lie in [0, 1]")
        if not (0.0 < self.epsilon < 1.0 - math.tan(1.0) / 2.0):
            raise ValueError("epsilon must lie in (0, 1 - tan(1)/2)")
        if self.h >= 1.0:
            raise ValueError("strip half-height h = tan(gamma)/2 + eps must stay below 1")

    @property
    def beta(self) -> float:
        return math.atan((1.0 - self.epsilon) / 2.0)

    @property
    def h(self) -> float:
        return math.tan(self.gamma) / 2.0 + self.epsilon

    @property
    def phi_gamma(self) -> float:
        return phi(self.gamma, self)

    @property
    def w(self) -> float:
        return 1.0 / (2.0 * self.phi_gamma)


def phi(alpha: float, params: NuParams) -> float:
    """phi(alpha) = cos(a) cos(b) (1/cos(a+b) + 1/cos(a-b)), b = beta.

    Even, convex on (-arctan 2, arctan 2), minimal value phi(0) = 2.
    """
    if abs(alpha) >= ARCTAN2:
        raise ValueError(f"phi undefined for |alpha| >= arctan 2 (got {alpha})")
    beta = params.beta
    return math.cos(alpha) * math.cos(beta) * (
        1.0 / math.cos(alpha + beta) + 1.0 / math.cos(alpha - beta)
    )


def psi(t: float, params: NuParams) -> float:
    """psi(t) = 1 - phi(arctan 2t)/phi(gamma); positive for |t| <= h."""
    return 1.0 - phi(math.atan(2.0 * t), params) / params.phi_gamma


def _psi_antiderivative(t: float, params: NuParams) -> float:
    # psi(t) = 1 - 2 / (phi_g (1 - cbar^2 t^2)) with cbar = 1 - eps
    cbar = 1.0 - params.epsilon
    return t - 2.0 / (params.phi_gamma * cbar) * math.atanh(cbar * t)


@dataclass
class _Needle:
    """One support piece in needle coordinates: s in [L(t), L(t)+eps] with
    L(t) = l0 + l1*t over t in [t_lo, t_hi]; half is -1 for s<=0, +1 else."""

    l0: float
    l1: float
    t_lo: float
    t_hi: float
    half: int
    kind: str  # "nu1" or "nu2"


@dataclass(frozen=True)
class AnalyticDualDensity:
    params: NuParams

    def needles(self) -> list[_Needle]:
        p = self.params
        eps = p.epsilon
        half_w = (1.0 - eps) / 2.0
        return [
            _Needle(-(1.0 + eps) / 2.0, +half_w, -1.0, 1.0, -1, "nu1"),  # P1
            _Needle(-(1.0 + eps) / 2.0, -half_w, -1.0, 1.0, -1, "nu1"),  # P2
            _Needle(half_w, +half_w, -1.0, 1.0, +1, "nu1"),              # P3
            _Needle(half_w, -half_w, -1.0, 1.0, +1, "nu1"),              # P4
            _Needle(-(1.0 + eps) / 2.0, 0.0, -p.h, p.h, -1, "nu2"),      # P5
            _Needle(half_w, 0.0, -p.h, p.h, +1, "nu2"),                  # P6
        ]

    def value(self, s: float, t: float) -> float:
        p = self.params
        eps = p.epsilon
        total = 0.0
        for nd in self.needles():
            if not (nd.t_lo <= t <= nd.t_hi):
                continue
            left = nd.l0 + nd.l1 * t
            if left <= s <= left + eps:
                total += p.w / eps if nd.kind == "nu1" else psi(t, p) / eps
        return total


@dataclass(frozen=True)
class DiscreteDualDensity:
    """Piecewise-constant density on an m x m grid over [-1,1]^2 in (s,t)."""

    values: np.ndarray

    def __post_init__(self) -> None:
        v = np.asarray(self.values, dtype=np.float64)
        if v.ndim != 2 or v.shape[0] != v.shape[1]:
            raise ValueError("discrete dual density must be a square grid")
        if v.min() < 0:
            raise ValueError("dual density must be nonnegative")
        object.__setattr__(self, "values", v)

    @property
    def m(self) -> int:
        return self.values.shape[0]

    def mass(self) -> float:
        m = self.m
        return float(self.values.sum()) * (2.0 / m) ** 2


DualDensity = Union[AnalyticDualDensity, DiscreteDualDensity]


# --- path integrals and the feasibility condition -----------------------------------


def _segment_in_needle(nd: _Needle, eps: float, s_lo: float, s_hi: float,
                       t0: float, slope: float) -> tuple[float, float]:
    """s-interval of {(s, t0 + slope*s): s in [s_lo, s_hi]} inside the needle."""
    lo, hi = s_lo, s_hi
    # t-range bounds
    for bound, sense in ((nd.t_lo, +1), (nd.t_hi, -1)):
        # sense +1: need t(s) >= bound; -1: t(s) <= bound
        coeff = slope * sense
        rhs = (bound - t0) * sense
        if coeff == 0.0:
            if t0 * sense < bound * sense:
                return (0.0, -1.0)
        elif coeff > 0.0:
            lo = max(lo, rhs / coeff)
        else:
            hi = min(hi, rhs / coeff)
    # s within [L(t), L(t)+eps]:  s - l1*(t0+slope*s) in [l0, l0+eps]
    coeff = 1.0 - nd.l1 * slope
    base = nd.l1 * t0
    for bound, sense in ((nd.l0 + base, +1), (nd.l0 + base + eps, -1)):
        cc = coeff * sense
        rhs = bound * sense
        if cc == 0.0:
            if 0.0 < rhs:
                return (0.0, -1.0)
        elif cc > 0.0:
            lo = max(lo, rhs / cc)
        else:
            hi = min(hi, rhs / cc)
    return (lo, hi)


def _analytic_path_integral(d: AnalyticDualDensity, s_lo: float, s_hi: float,
                            t0: float, slope: float) -> float:
    """Exact integral of nu along t(s) = t0 + slope*s over [s_lo, s_hi]."""
    if abs(slope) < 1e-12:
        slope = 0.0  # cancellation noise in x0 +- y0 would blow up 1/slope
    p = d.params
    eps = p.epsilon
    half = -1 if s_hi <= 0 else +1
    total = 0.0
    for nd in d.needles():
        if nd.half != half:
            continue
        lo, hi = _segment_in_needle(nd, eps, s_lo, s_hi, t0, slope)
        if hi <= lo:
            continue
        if nd.kind == "nu1":
            total += p.w / eps * (hi - lo)
        else:
            if slope == 0.0:
                total += psi(t0, p) / eps * (hi - lo)
            else:
                ta, tb = t0 + slope * lo, t0 + slope * hi
                total += (_psi_antiderivative(tb, p) - _psi_antiderivative(ta, p)) / (
                    eps * slope
                )
    return total


def _discrete_path_integral(d: DiscreteDualDensity, s_lo: float, s_hi: float,
                            t0: float, slope: float) -> float:
    row = _discrete_path_row(d.m, s_lo, s_hi, t0, slope)
    return float((row * d.values.ravel()).sum())


def _discrete_path_row(m: int, s_lo: float, s_hi: float, t0: float, slope: float) -> np.ndarray:
    """Length weights of the path within each grid cell (flattened m x m row,
    cell (k, l) = s-column k, t-row l, at index k*m + l).

    Within one s-column the path's t-range is an interval; the s-length in a
    t-cell is the t-overlap divided by |slope|.
    """
    if abs(slope) < 1e-12:
        slope = 0.0  # cancellation noise in x0 +- y0 would blow up 1/slope
    out = np.zeros(m * m)
    edges = np.linspace(-1.0, 1.0, m + 1)
    k_lo = max(0, int(math.floor((s_lo + 1.0) * m / 2.0)))
    k_hi = min(m - 1, int(math.ceil((s_hi + 1.0) * m / 2.0)) - 1)
    for k in range(k_lo, k_hi + 1):
        sa = max(s_lo, edges[k])
        sb = min(s_hi, edges[k + 1])
        if sb <= sa:
            continue
        if slope == 0.0:
            if -1.0 <= t0 <= 1.0:
                l = min(m - 1, max(0, int((t0 + 1.0) * m / 2.0)))
                out[k * m + l] += sb - sa
            continue
        t1 = t0 + slope * sa
        t2 = t0 + slope * sb
        if t1 > t2:
            t1, t2 = t2, t1
        t1 = max(t1, -1.0)
        t2 = min(t2, 1.0)
        if t2 <= t1:
            continue
        inv = 1.0 / abs(slope)
        l_lo = min(m - 1, max(0, int(math.floor((t1 + 1.0) * m / 2.0))))
        l_hi = min(m - 1, max(0, int(math.ceil((t2 + 1.0) * m / 2.0)) - 1))
        for l in range(l_lo, l_hi + 1):
            overlap = min(t2, edges[l + 1]) - max(t1, edges[l])
            if overlap > 0.0:
                out[k * m + l] += overlap * inv
    return out


def nu_condition(d: DualDensity, x0: float, y0: float) -> float:
    """LHS of the covering condition at board point (x0, y0), exact up to
    float rounding for the analytic form, exact piecewise for grids."""
    if isinstance(d, AnalyticDualDensity):
        return (
            _analytic_path_integral(d, -1.0, 0.0, y0, x0 + y0)
            + _analytic_path_integral(d, 0.0, 1.0, y0, x0 - y0)
        )
    return (
        _discrete_path_integral(d, -1.0, 0.0, y0, x0 + y0)
        + _discrete_path_integral(d, 0.0, 1.0, y0, x0 - y0)
    )


def nu_condition_grid(d: DualDensity, grid: int) -> np.ndarray:
    """nu_condition sampled on a grid x grid lattice of [-1,1]^2."""
    pts = np.linspace(-1.0, 1.0, grid)
    out = np.empty((grid, grid))
    for i, x0 in enumerate(pts):
        for j, y0 in enumerate(pts):
            out[i, j] = nu_condition(d, float(x0), float(y0))
    return out


def nu_total_mass(params: NuParams) -> float:
    """Closed-form mass of the analytic density:

        4/phi(gamma) + 4h - 8/(phi(gamma)(1-eps)) * artanh((1-eps) h).
    """
    h = params.h
    cbar = 1.0 - params.epsilon
    pg = params.phi_gamma
    return 4.0 / pg + 4.0 * h - 8.0 / (pg * cbar) * math.atanh(cbar * h)


def nu_mass_quadrature(d: AnalyticDualDensity, order: int = 64) -> float:
    """Independent 2-D integration of nu over its support (per needle,
    Gauss-Legendre across the strip height; the cross-section is exact)."""
    p = d.params
    eps = p.epsilon
    nodes, weights = np.polynomial.legendre.leggauss(order)
    total = 0.0
    for nd in d.needles():
        span = nd.t_hi - nd.t_lo
        ts = (nodes + 1.0) / 2.0 * span + nd.t_lo
        ws = weights / 2.0 * span
        if nd.kind == "nu1":
            vals = np.full_like(ts, p.w / eps)
        else:
            vals = np.array([psi(float(t), p) / eps for t in ts])
        # horizontal cross-section has width eps at every height
        total += float((vals * ws).sum()) * eps
    return total


# --- snake weightings (feasible LP_c points at finite n) -----------------------------


@dataclass
class SnakeWeighting:
    """A finite nonnegative weighting of snakes with recorded coverage.

    rho maps each snake's canonical key to its weight; coverage[i-1, j-1]
    is the resulting total over snakes containing cell (i, j) (already
    including safety_scale).  feasible means min coverage >= 1, in which
    case total_value upper-bounds the optimum of the covering LP.
    """

    n: int
    rho: dict[str, float]
    coverage: np.ndarray
    safety_scale: float
    total_value: float
    min_coverage: float
    feasible: bool


DYADIC_BITS = 26


def _dyadic(x: float) -> Fraction:
    return Fraction(round(x * (1 << DYADIC_BITS)), 1 << DYADIC_BITS)


def _slab_lines_analytic(d: AnalyticDualDensity, board: Board,
                         slabs_per_needle: int) -> tuple[np.ndarray, np.ndarray]:
    """Decompose each needle into horizontal slabs aligned with the dual
    curves of the grid vertices; return (scaled line rows, slab masses).

    Slab boundaries sit where a vertex curve crosses the needle's midline
    or either edge, refined uniformly to at least slabs_per_needle pieces,
    so nearly all of each slab lies in one region of constant snake.
    """
    p = d.params
    eps = p.epsilon
    n = board.n
    verts = np.linspace(-1.0, 1.0, n + 1)
    vx, vy = [a.ravel() for a in np.meshgrid(verts, verts, indexing="ij")]

    rows = []
    masses = []
    for nd in d.needles():
        u = vx + vy if nd.half < 0 else vx - vy
        cuts = [nd.t_lo, nd.t_hi]
        for offset in (0.0, eps / 2.0, eps):
            denom = 1.0 - nd.l1 * u
            tstar = (vy + (nd.l0 + offset) * u) / denom
            good = (tstar > nd.t_lo) & (tstar < nd.t_hi)
            cuts.extend(tstar[good].tolist())
        cuts = sorted(set(cuts))
        # uniform refinement so no slab exceeds span / slabs_per_needle
        span = nd.t_hi - nd.t_lo
        max_h = span / slabs_per_needle
        refined = []
        for ta, tb in zip(cuts, cuts[1:]):
            refined.append(ta)
            gap = tb - ta
            if gap > max_h:
                extra = int(gap / max_h)
                refined.extend(ta + gap * k / (extra + 1) for k in range(1, extra + 1))
        refined.append(cuts[-1])
        for ta, tb in zip(refined, refined[1:]):
            if tb <= ta:
                continue
            if nd.kind == "nu1":
                mass = p.w * (tb - ta)
            else:
                mass = _psi_antiderivative(tb, p) - _psi_antiderivative(ta, p)
            if mass <= 0.0:
                continue
            tm = (ta + tb) / 2.0
            sm = nd.l0 + nd.l1 * tm + eps / 2.0
            rows.append(_scaled_dual_line(n, sm, tm))
            masses.append(mass)
    return np.array(rows, dtype=np.int64), np.array(masses)


def _scaled_dual_line(n: int, s: float, t: float) -> tuple[int, int, int, int, int]:
    """l(s, t) rounded to the dyadic grid, as scaled int64 walk coefficients."""
    den = 1 << DYADIC_BITS
    ps = round(s * den)
    pt = round(t * den)
    a, b, c = ps, den - abs(ps), pt
    # board rescale: A x + B y = C  ->  2a X + 2b Y = n (a + b + c)
    return (2 * a, 2 * b, n * (a + b + c), 0, 0)


def _slab_lines_discrete(d: DiscreteDualDensity, board: Board,
                         slabs_per_column: int) -> tuple[np.ndarray, np.ndarray]:
    """Column-by-column slab decomposition of a grid density."""
    m = d.m
    n = board.n
    verts = np.linspace(-1.0, 1.0, n + 1)
    vx, vy = [a.ravel() for a in np.meshgrid(verts, verts, indexing="ij")]
    edges = np.linspace(-1.0, 1.0, m + 1)
    rows = []
    masses = []
    for k in range(m):
        sa, sb = edges[k], edges[k + 1]
        sm = (sa + sb) / 2.0
        u = vx + vy if sb <= 0 else vx - vy
        # t-positions of the dual curves at the column midline
        tcuts = vy + sm * u
        cuts = np.concatenate([edges, tcuts])
        cuts = np.unique(np.clip(cuts, -1.0, 1.0))
        refined = [-1.0]
        max_h = 2.0 / slabs_per_column
        for ta, tb in zip(cuts, cuts[1:]):
            gap = tb - ta
            if gap > max_h:
                extra = int(gap / max_h)
                refined.extend(ta + gap * q / (extra + 1) for q in range(1, extra + 1))
            refined.append(tb)
        width = sb - sa
        for ta, tb in zip(refined, refined[1:]):
            if tb <= ta:
                continue
            tm = (ta + tb) / 2.0
            row_idx = min(m - 1, max(0, int((tm + 1.0) * m / 2.0)))
            val = float(d.values[k, row_idx])
            if val == 0.0:
                continue
            rows.append(_scaled_dual_line(n, sm, tm))
            masses.append(val * width * (tb - ta))
    return np.array(rows, dtype=np.int64), np.array(masses)


def snake_weighting_from_nu(
    d: DualDensity,
    board: Board,
    safety_scale: Optional[float] = None,
    slabs_per_needle: int = 32768,
    slabs_per_column: int = 512,
) -> SnakeWeighting:
    """Turn a dual density into an explicit finite snake weighting.

    The density mass is decomposed into slabs, each slab's mass is assigned
    to the snake of a representative line, and the per-cell coverage of the
    resulting weighting is recorded exactly as built.  With safety_scale
    omitted, the weighting is rescaled by 1/min(coverage) so it is feasible
    for the covering LP by construction; total_value then upper-bounds the
    LP optimum at this n.
    """
    n = board.n
    if isinstance(d, AnalyticDualDensity):
        rows, masses = _slab_lines_analytic(d, board, slabs_per_needle)
    else:
        rows, masses = _slab_lines_discrete(d, board, slabs_per_column)
    jlo, jhi, transposed = kernels.pierce_ranges(rows, n)
    nonempty = (jlo <= jhi).any(axis=1)
    cov = kernels.accumulate_coverage(jlo, jhi, transposed.astype(np.uint8), masses, n)
    cov *= 0.5 * n
    min_cov = float(cov.min())
    if safety_scale is None:
        if min_cov <= 0:
            raise ValueError("density leaves cells uncovered; cannot auto-scale")
        safety_scale = (1.0 + 1e-12) / min_cov

    rho: dict[str, float] = {}
    for k in range(len(rows)):
        if not nonempty[k]:
            continue
        key = (bool(transposed[k]), jlo[k].tobytes(), jhi[k].tobytes())
        rho[key] = rho.get(key, 0.0) + float(masses[k])
    named: dict[str, float] = {}
    for (tr, lo_b, hi_b), mass in rho.items():
        lo = np.frombuffer(lo_b, dtype=np.int64)
        hi = np.frombuffer(hi_b, dtype=np.int64)
        cells = kernels.ranges_to_cells(lo, hi, tr)
        key = " ".join(f"{i},{j}" for i, j in cells)
        named[key] = named.get(key, 0.0) + 0.5 * n * safety_scale * mass
    cov_scaled = cov * safety_scale
    min_scaled = float(cov_scaled.min())
    return SnakeWeighting(
        n=n,
        rho=named,
        coverage=cov_scaled,
        safety_scale=float(safety_scale),
        total_value=float(sum(named.values())),
        min_coverage=min_scaled,
        feasible=min_scaled >= 1.0 - 1e-12,
    )


def window_coverage(d: AnalyticDualDensity, board: Board, i: int, j: int) -> float:
    """Independent check value: (n/2) * integral of nu over the region of
    lines piercing cell (i, j), via the vertical-window average."""
    n = board.n
    x0 = -1.0 + (2 * i - 1) / n
    y0 = -1.0 + (2 * j - 1) / n
    nodes, weights = np.polynomial.legendre.leggauss(48)
    tau = nodes / n
    wts = weights / 2.0
    total = 0.0
    for t_off, w in zip(tau, wts):
        total += w * (
            _analytic_path_integral(d, -1.0, 0.0, y0 + t_off, x0 + y0)
            + _analytic_path_integral(d, 0.0, 1.0, y0 + t_off, x0 - y0)
        )
    return total


# --- the discrete dual LP ------------------------------------------------------------


def _st_cell_maps(m: int) -> np.ndarray:
    """Flat index permutations of the m x m (s,t) grid under the 8 board
    symmetries (lines map to lines, so the dihedral group acts on the
    parameter square; even m keeps the grid invariant)."""
    if m % 2:
        raise ValueError("symmetry reduction needs an even grid")
    centers = (-1.0 + (2.0 * np.arange(m) + 1.0) / m * 1.0)

    def index_of(vals: np.ndarray) -> np.ndarray:
        idx = np.rint((vals + 1.0) * m / 2.0 - 0.5).astype(np.int64)
        assert np.allclose(centers[idx], vals, atol=1e-9)
        return idx

    sc, tc = np.meshgrid(centers, centers, indexing="ij")
    s = sc.ravel()
    t = tc.ravel()
    perms = []
    for swap in (False, True):
        for sx in (1, -1):
            for sy in (1, -1):
                if swap:
                    s2 = np.where(s >= 0, 1.0 - s, -1.0 - s)
                    t2 = np.where(s >= 0, t, -t)
                else:
                    s2, t2 = s.copy(), t.copy()
                if sx < 0:
                    s2 = -s2
                if sy < 0:
                    s2, t2 = -s2, -t2
                perms.append(index_of(s2) * m + index_of(t2))
    return np.array(perms, dtype=np.int64)


def _board_sample_maps(sample_m: int) -> np.ndarray:
    """Flat index permutations of the board sample centers under D8."""
    m = sample_m
    idx = np.arange(m)
    xi, yi = np.meshgrid(idx, idx, indexing="ij")
    xi = xi.ravel()
    yi = yi.ravel()
    perms = []
    for swap in (False, True):
        for sx in (1, -1):
            for sy in (1, -1):
                a, b = (yi, xi) if swap else (xi, yi)
                if sx < 0:
                    a = m - 1 - a
                if sy < 0:
                    b = m - 1 - b
                perms.append(a * m + b)
    return np.array(perms, dtype=np.int64)


def discrete_dual_lp(
    grid_m: int,
    sample_m: int,
    max_iterations: int = 10**6,
) -> tuple[float, DiscreteDualDensity]:
    """Minimal-mass grid density satisfying the covering condition at the
    sample_m x sample_m cell centers of the board.

    Both the density grid and the constraint set are invariant under the
    board symmetries, so (for even grid_m) the LP is solved over symmetry
    orbits at an 8-fold reduction; the optimum is unchanged because any
    feasible density symmetrizes to an orbit-constant one of equal mass.
    The covering LP is solved through its dual (feasible at the origin),
    the density is read off the dual multipliers, re-verified against
    every sample constraint, and rescaled into exact sample feasibility.
    """
    if grid_m < 4 or sample_m < 4:
        raise ValueError("grids below 4x4 are degenerate")
    m = grid_m
    area = (2.0 / m) ** 2
    centers = np.array([-1.0 + (2 * k + 1.0) / sample_m for k in range(sample_m)])

    def sample_row(flat: int) -> np.ndarray:
        x0 = centers[flat // sample_m]
        y0 = centers[flat % sample_m]
        return _discrete_path_row(m, -1.0, 0.0, y0, x0 + y0) + _discrete_path_row(
            m, 0.0, 1.0, y0, x0 - y0
        )

    if m % 2 == 0:
        cell_orbit_of = np.min(_st_cell_maps(m), axis=0)
        orbit_ids, cell_orbit, orbit_size = np.unique(
            cell_orbit_of, return_inverse=True, return_counts=True
        )
        n_orbits = len(orbit_ids)
        sample_reps = np.unique(np.min(_board_sample_maps(sample_m), axis=0))
        A_red = np.zeros((len(sample_reps), n_orbits))
        for r, flat in enumerate(sample_reps):
            A_red[r] = np.bincount(cell_orbit, weights=sample_row(int(flat)),
                                   minlength=n_orbits)
        c_red = orbit_size * area
    else:
        cell_orbit = np.arange(m * m)
        n_orbits = m * m
        sample_reps = np.arange(sample_m * sample_m)
        A_red = np.zeros((len(sample_reps), n_orbits))
        for r, flat in enumerate(sample_reps):
            A_red[r] = sample_row(int(flat))
        c_red = np.full(n_orbits, area)

    dual = LinearProgram(
        "max", np.ones(len(sample_reps)), A_red.T, ["<="] * n_orbits, c_red
    )
    sol = solve_lp(dual, max_iterations=max_iterations)
    if sol.status != "optimal":
        raise RuntimeError(f"discrete dual LP did not converge: {sol.status}")
    nu_orbit = np.clip(sol.duals, 0.0, None)
    nu = nu_orbit[cell_orbit]

    worst = math.inf
    for flat in range(sample_m * sample_m):
        worst = min(worst, float(sample_row(flat) @ nu))
    if worst <= 0:
        raise RuntimeError("dual recovery produced an infeasible density")
    nu_scaled = nu / worst if worst < 1.0 else nu
    density = DiscreteDualDensity(nu_scaled.reshape(m, m))
    return density.mass(), density


# --- CSV serialization ----------------------------------------------------------------


def dual_density_to_csv(d: DiscreteDualDensity) -> str:
    lines = ["s_index,t_index,value"]
    m = d.m
    for k in range(m):
        for l in range(m):
            lines.append(f"{k},{l},{float(d.values[k, l])!r}")
    return "\n".join(lines) + "\n"


def dual_density_from_csv(text: str) -> DiscreteDualDensity:
    rows = text.strip().splitlines()
    if rows[0].strip() != "s_index,t_index,value":
        raise ValueError("unrecognized dual-density CSV header")
    entries = []
    for row in rows[1:]:
        k, l, v = row.split(",")
        entries.append((int(k), int(l), float(v)))
    m = max(max(k for k, _, _ in entries), max(l for _, l, _ in entries)) + 1
    values = np.zeros((m, m))
    for k, l, v in entries:
        values[k, l] = v
    return DiscreteDualDensity(values)
