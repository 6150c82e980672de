"""Command-line interface.

One subcommand per artifact: bound (certified LP lower bound), exact
(exhaustive p_n/h_n), search (k-line feasibility), construct (explicit
families), check-density / check-dual-density (certificate checks),
dual-lp (discrete grid LP), snakes (enumerate/cache), heatmap, verify-cert.

Exit codes: 0 success, 1 invalid arguments, 2 a computation failed its
exact re-validation, 3 a resource guard tripped.
"""

from __future__ import annotations

import argparse
import os
import sys
from fractions import Fraction
from pathlib import Path

import numpy as np

from . import _backend
from .bounds import CoverResult, ResourceGuardError, cover_search, exact_min_cover, lp_dual_bound
from .constructions import (
    LineFamily,
    family_from_json,
    family_to_json,
    hitting_family,
    piercing_family,
    verify_family,
)
from .density import (
    BUILTINS,
    area_integral,
    density_from_json,
    max_line_integral,
    weights_from_density,
)
from .dualdensity import (
    AnalyticDualDensity,
    DiscreteDualDensity,
    NuParams,
    discrete_dual_lp,
    dual_density_from_csv,
    dual_density_to_csv,
    nu_condition_grid,
    nu_total_mass,
    phi,
    snake_weighting_from_nu,
)
from .geometry import Board
from .lp import (
    BoundCertificate,
    CertificateError,
    CertificateParseError,
    CertificateValidationError,
    CertificateVersionError,
    certify_dual_weights,
)
from .snakes import WeightGrid, default_cache_dir, enumerate_snakes

EXIT_OK = 0
EXIT_USAGE = 1
EXIT_VALIDATION = 2
EXIT_GUARD = 3


# --- heatmap emission -----------------------------------------------------------


def _grid_values(grid) -> np.ndarray:
    if isinstance(grid, WeightGrid):
        out = np.zeros((grid.n, grid.n))
        for (i, j), w in grid.weights.items():
            out[i - 1, j - 1] = float(w)
        return out
    if isinstance(grid, DiscreteDualDensity):
        return np.asarray(grid.values, dtype=np.float64)
    raise TypeError(f"cannot render {type(grid).__name__} as a heatmap")


_RAMP_DARK = (13, 18, 74)
_RAMP_LIGHT = (252, 233, 116)


def emit_heatmap(grid, fmt: str, path: str | Path) -> Path:
    """Write a WeightGrid or discrete dual density as CSV or SVG.

    Byte-deterministic: fixed ordering, repr-rendered values, and an
    integer-rounded two-color ramp (dark = small values).
    """
    values = _grid_values(grid)
    if values.size == 0:
        raise ValueError("empty grid")
    path = Path(path)
    if fmt == "csv":
        rows = ["i,j,value"]
        for i in range(values.shape[0]):
            for j in range(values.shape[1]):
                rows.append(f"{i + 1},{j + 1},{float(values[i, j])!r}")
        path.write_text("\n".join(rows) + "\n")
        return path
    if fmt != "svg":
        raise ValueError(f"unknown heatmap format {fmt!r}")
    vmax = float(values.max())
    cell = 12
    m, n = values.shape
    parts = [
        f'<svg xmlns="http://www.w3.org/2000/svg" width="{n * cell}" '
        f'height="{m * cell}" viewBox="0 0 {n * cell} {m * cell}">'
    ]
    for i in range(m):
        for j in range(n):
            frac = values[i, j] / vmax if vmax > 0 else 0.0
            rgb = tuple(
                round(a + (b - a) * frac) for a, b in zip(_RAMP_DARK, _RAMP_LIGHT)
            )
            # row i of the board drawn bottom-up so cell (1,1) is bottom-left
            parts.append(
                f'<rect x="{j * cell}" y="{(m - 1 - i) * cell}" width="{cell}" '
                f'height="{cell}" fill="#{rgb[0]:02x}{rgb[1]:02x}{rgb[2]:02x}"/>'
            )
    parts.append("</svg>")
    path.write_text("\n".join(parts) + "\n")
    return path


def certificate_roundtrip(path: str | Path) -> BoundCertificate:
    """Load a certificate from disk and re-validate it exactly."""
    cert = BoundCertificate.from_json(Path(path).read_text())
    cert.validate()
    return cert


# --- subcommand handlers -----------------------------------------------------------


def _cmd_bound(args) -> int:
    board = Board(args.n)
    cert = lp_dual_bound(
        board,
        tolerance=args.tolerance,
        max_rounds=args.max_rounds,
        cuts_per_round=args.cuts,
        verbose=args.verbose,
    )
    cert.validate()
    print(f"n = {args.n}")
    print(f"certified lower bound M_n = {cert.bound} = {float(cert.bound):.6f}")
    print(f"bound / n = {float(cert.bound) / args.n:.6f}")
    print(f"rounds = {cert.generator['rounds']}  converged = {cert.generator['converged']}")
    if args.out:
        Path(args.out).write_text(cert.to_json())
        print(f"certificate written to {args.out}")
    return EXIT_OK


def _cmd_exact(args) -> int:
    board = Board(args.n)
    value, witness = exact_min_cover(board, args.mode, guard=args.guard, force=args.force)
    name = "p_n" if args.mode == "pierce" else "h_n"
    print(f"{name}({args.n}) = {value}  (witness: {len(witness)} lines, re-validated)")
    if args.out:
        family = LineFamily(args.n, args.mode, list(witness), "exact_min_cover")
        Path(args.out).write_text(family_to_json(family))
        print(f"witness written to {args.out}")
    return EXIT_OK


def _cmd_search(args) -> int:
    board = Board(args.n)
    result: CoverResult = cover_search(board, args.mode, args.k)
    print(
        f"n={args.n} mode={args.mode} k={args.k}: "
        f"{'feasible' if result.feasible else 'infeasible'} (proof: {result.proof})"
    )
    if result.feasible and args.out:
        family = LineFamily(args.n, args.mode, list(result.witness), "cover_search")
        Path(args.out).write_text(family_to_json(family))
        print(f"witness written to {args.out}")
    return EXIT_OK


def _cmd_construct(args) -> int:
    board = Board(args.n)
    family = piercing_family(board) if args.mode == "pierce" else hitting_family(board)
    if args.verify:
        uncovered = verify_family(board, family)
        if uncovered:
            print(f"FAIL: {len(uncovered)} cells uncovered", file=sys.stderr)
            return EXIT_VALIDATION
        print(f"verified: all {args.n * args.n} cells covered")
    print(f"{len(family.lines)} lines ({family.provenance})")
    if args.out:
        Path(args.out).write_text(family_to_json(family))
        print(f"written to {args.out}")
    return EXIT_OK


def _cmd_check_density(args) -> int:
    if args.file:
        dens = density_from_json(Path(args.file).read_text())
    else:
        dens = BUILTINS[args.builtin]
    area = area_integral(dens)
    best, (a, b) = max_line_integral(dens, grid=args.grid)
    print(f"density: {dens.name or 'custom'}")
    print(f"area integral        = {area:.6f}")
    print(f"max line integral    = {best:.6f}  at slope a = {a:.4f}, intercept b = {b:.4f}")
    print(f"lipschitz bound      = {dens.lipschitz_bound:.6f}")
    feasible = best <= 1.0 + 1e-9
    print(f"certificate condition (max <= 1): {'satisfied' if feasible else 'VIOLATED'}")
    print(f"implied asymptotic bound: p_n > {area / 2 / max(best, 1.0):.6f} * n")
    if args.n:
        board = Board(args.n)
        cert = certify_dual_weights(board, weights_from_density(dens, board))
        cert.validate()
        print(f"certified bound at n={args.n}: {float(cert.bound):.6f} "
              f"({float(cert.bound)/args.n:.6f} * n)")
        if args.out:
            Path(args.out).write_text(cert.to_json())
            print(f"certificate written to {args.out}")
    return EXIT_OK


def _cmd_check_dual_density(args) -> int:
    if args.file:
        dens = dual_density_from_csv(Path(args.file).read_text())
        print(f"discrete dual density {dens.m}x{dens.m}, mass = {dens.mass():.6f}")
    else:
        params = NuParams(args.gamma, args.epsilon)
        dens = AnalyticDualDensity(params)
        print(f"gamma = {args.gamma}  epsilon = {args.epsilon}")
        print(f"phi(0) = {phi(0.0, params)!r}  phi(gamma) = {phi(args.gamma, params):.6f}")
        print(f"closed-form mass = {nu_total_mass(params):.6f}")
    grid = nu_condition_grid(dens, args.grid)
    print(f"covering condition on a {args.grid}x{args.grid} grid: "
          f"min = {grid.min():.9f}, mean = {grid.mean():.6f}")
    if grid.min() < 1.0 - 1e-6:
        print("condition VIOLATED (needs >= 1)", file=sys.stderr)
        return EXIT_VALIDATION
    if args.n:
        weighting = snake_weighting_from_nu(dens, Board(args.n))
        print(f"snake weighting at n={args.n}: value = {weighting.total_value:.4f} "
              f"({weighting.total_value / args.n:.5f} * n), "
              f"min coverage = {weighting.min_coverage:.6f}, feasible = {weighting.feasible}")
        if not weighting.feasible:
            return EXIT_VALIDATION
    return EXIT_OK


def _cmd_dual_lp(args) -> int:
    mass, dens = discrete_dual_lp(args.grid, args.samples)
    print(f"grid {args.grid}x{args.grid}, samples {args.samples}x{args.samples}")
    print(f"feasible mass = {mass:.6f}  (LP-method bound factor {mass / 2:.6f} * n)")
    if args.out:
        Path(args.out).write_text(dual_density_to_csv(dens))
        print(f"density written to {args.out}")
    return EXIT_OK


def _cmd_snakes(args) -> int:
    cache = args.cache_dir or default_cache_dir()
    family = enumerate_snakes(Board(args.n), cache_dir=cache)
    sizes = {}
    for snake in family.snakes:
        sizes[len(snake)] = sizes.get(len(snake), 0) + 1
    print(f"n = {args.n}: {len(family)} distinct snakes "
          f"({len(family.maximal())} inclusion-maximal)")
    print("size histogram: " + " ".join(f"{k}:{sizes[k]}" for k in sorted(sizes)))
    if cache:
        print(f"cache dir: {cache}")
    return EXIT_OK


def _cmd_heatmap(args) -> int:
    src = Path(args.input)
    text = src.read_text()
    if src.suffix == ".csv" or text.startswith("s_index"):
        grid = dual_density_from_csv(text)
    else:
        cert = BoundCertificate.from_json(text)
        if cert.kind != "lower":
            print("only lower-bound certificates carry a weight grid", file=sys.stderr)
            return EXIT_USAGE
        grid = cert.witness_weights
    emit_heatmap(grid, args.format, args.out)
    print(f"wrote {args.format} heatmap to {args.out}")
    return EXIT_OK


def _cmd_verify_cert(args) -> int:
    cert = certificate_roundtrip(args.input)
    print(f"certificate OK: n={cert.n} kind={cert.kind} bound={cert.bound} "
          f"= {float(cert.bound):.6f}")
    return EXIT_OK


# --- parser ------------------------------------------------------------------------


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="plankline",
        description="Certified bounds for piercing/hitting all cells of the "
        "n x n chessboard with lines.",
    )
    parser.add_argument("--threads", type=int, default=0,
                        help="worker threads for the scan kernels (0 = all)")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("bound", help="certified LP lower bound on p_n")
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--tolerance", type=float, default=1e-9)
    p.add_argument("--max-rounds", type=int, default=400)
    p.add_argument("--cuts", type=int, default=32)
    p.add_argument("--out", type=str, default="")
    p.add_argument("--verbose", action="store_true")
    p.set_defaults(handler=_cmd_bound)

    p = sub.add_parser("exact", help="exact p_n/h_n by exhaustive cover search")
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--mode", choices=["pierce", "hit"], default="pierce")
    p.add_argument("--guard", type=int, default=7)
    p.add_argument("--force", action="store_true")
    p.add_argument("--out", type=str, default="")
    p.set_defaults(handler=_cmd_exact)

    p = sub.add_parser("search", help="k-line cover feasibility")
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--k", type=int, required=True)
    p.add_argument("--mode", choices=["pierce", "hit"], default="pierce")
    p.add_argument("--out", type=str, default="")
    p.set_defaults(handler=_cmd_search)

    p = sub.add_parser("construct", help="explicit piercing/hitting families")
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--mode", choices=["pierce", "hit"], default="pierce")
    p.add_argument("--verify", action="store_true")
    p.add_argument("--out", type=str, default="")
    p.set_defaults(handler=_cmd_construct)

    p = sub.add_parser("check-density", help="primal density certificate values")
    p.add_argument("--builtin", choices=sorted(BUILTINS), default="mu1")
    p.add_argument("--file", type=str, default="")
    p.add_argument("--grid", type=int, default=2048)
    p.add_argument("--n", type=int, default=0,
                   help="also certify the discretized weights at this n")
    p.add_argument("--out", type=str, default="")
    p.set_defaults(handler=_cmd_check_density)

    p = sub.add_parser("check-dual-density", help="dual density condition and mass")
    p.add_argument("--gamma", type=float, default=0.746)
    p.add_argument("--epsilon", type=float, default=1e-4)
    p.add_argument("--file", type=str, default="", help="discrete density CSV")
    p.add_argument("--grid", type=int, default=200)
    p.add_argument("--n", type=int, default=0,
                   help="also build the finite-n snake weighting")
    p.set_defaults(handler=_cmd_check_dual_density)

    p = sub.add_parser("dual-lp", help="discrete dual-grid LP (LP-method limit)")
    p.add_argument("--grid", type=int, default=60)
    p.add_argument("--samples", type=int, default=60)
    p.add_argument("--out", type=str, default="")
    p.set_defaults(handler=_cmd_dual_lp)

    p = sub.add_parser("snakes", help="enumerate and cache the snake family")
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--cache-dir", type=str, default="")
    p.set_defaults(handler=_cmd_snakes)

    p = sub.add_parser("heatmap", help="emit CSV/SVG heatmaps")
    p.add_argument("--input", type=str, required=True,
                   help="certificate JSON or dual-density CSV")
    p.add_argument("--format", choices=["csv", "svg"], default="svg")
    p.add_argument("--out", type=str, required=True)
    p.set_defaults(handler=_cmd_heatmap)

    p = sub.add_parser("verify-cert", help="re-validate a stored certificate")
    p.add_argument("--input", type=str, required=True)
    p.set_defaults(handler=_cmd_verify_cert)

    return parser


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return EXIT_OK if exc.code in (0, None) else EXIT_USAGE
    if args.threads:
        _backend.set_num_threads(args.threads)
    try:
        return args.handler(args)
    except ResourceGuardError as exc:
        print(f"resource guard: {exc}", file=sys.stderr)
        return EXIT_GUARD
    except CertificateVersionError as exc:
        print(f"certificate version error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except CertificateParseError as exc:
        print(f"certificate parse error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except CertificateValidationError as exc:
        print(f"certificate validation FAILED: {exc}", file=sys.stderr)
        return EXIT_VALIDATION
    except AssertionError as exc:
        print(f"exact re-validation FAILED: {exc}", file=sys.stderr)
        return EXIT_VALIDATION
    except (ValueError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
