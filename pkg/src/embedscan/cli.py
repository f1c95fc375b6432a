"""Command-line interface: ``check``, ``sample`` and ``bounds``."""

from __future__ import annotations

import argparse
import json
import sys
from typing import List, Optional

from .census import FULL_SAMPLE_COUNT, REFERENCE_PERCENT, CensusConfig, census_summary, run_census
from .errors import EmbedError, ParseError, ValidationError
from .ingest import FORMATS, parse_matrix
from .report import render_text
from .solver import solve
from .spectral import det_threshold
from .tolerances import resolve_tolerance

EXIT_OK = 0
EXIT_NOT_EMBEDDABLE = 1
EXIT_INPUT_ERROR = 2
EXIT_UNSUPPORTED = 3


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="embedscan", description="Decide whether a Markov matrix is the exponential of a rate matrix.")
    sub = parser.add_subparsers(dest="command", required=True)

    check = sub.add_parser("check", help="decide embeddability of one matrix")
    check.add_argument("file", help="CSV or JSON matrix file; '-' reads standard input")
    check.add_argument("--format", choices=FORMATS, help="input format (default: from extension)")
    check.add_argument("--tol", help="scalar entry tolerance or JSON object of tolerance fields "
                                     "(overrides EMBEDSCAN_TOL)")
    check.add_argument("--all-generators", action="store_true",
                       help="list every generator instead of the first")
    check.add_argument("--json", action="store_true", help="emit the JSON report")

    sample = sub.add_parser("sample", help="Monte-Carlo census of random 4x4 Markov matrices")
    sample.add_argument("--n", type=int, default=100_000, help="number of samples (default 1e5)")
    sample.add_argument("--seed", type=int, required=True)
    sample.add_argument("--full", action="store_true",
                        help=f"run the full {FULL_SAMPLE_COUNT:.0e}-sample census (hours)")
    sample.add_argument("--workers", type=int, default=1, help="worker processes")
    sample.add_argument("--tol", help="tolerance override, as for check")
    sample.add_argument("--json", action="store_true", help="emit the JSON result")

    bounds = sub.add_parser("bounds", help="determinant above which the principal log decides")
    bounds.add_argument("--n", type=int, required=True, help="matrix size, at least 2")
    return parser


def _check(args, out) -> int:
    tol = resolve_tolerance(args.tol)
    matrix = parse_matrix(args.file, args.format, tol)
    report = solve(matrix, tol)
    out.write((report.to_json() if args.json else render_text(report, args.all_generators)) + "\n")
    if report.embeddable is None:
        return EXIT_UNSUPPORTED
    return EXIT_OK if report.embeddable else EXIT_NOT_EMBEDDABLE


def _sample(args, out) -> int:
    count = FULL_SAMPLE_COUNT if args.full else args.n
    tol = resolve_tolerance(args.tol)
    try:
        cfg = CensusConfig(sample_count=count, seed=args.seed, tol=tol, workers=args.workers)
    except ValueError as exc:
        raise ValidationError(str(exc)) from None
    result = run_census(cfg)
    out.write((json.dumps(result.to_dict(), indent=2) if args.json
               else census_summary(result, REFERENCE_PERCENT)) + "\n")
    c = result.counts
    ok = (c["Delta_dd"].samples <= c["Delta_dlc"].samples <= c["Delta"].samples
          and c["Delta"].embeddable == c["Delta_Id"].embeddable
          and result.max_exp_residual < tol.reconstruct_tol)
    return EXIT_OK if ok else EXIT_NOT_EMBEDDABLE


def _bounds(args, out) -> int:
    if args.n < 1:
        raise ValidationError(f"--n must be a positive matrix size, got {args.n}")
    value = det_threshold(args.n)
    out.write(f"{value:.6f}\n")
    return EXIT_OK


def main(argv: Optional[List[str]] = None, out=None, err=None) -> int:
    """Run the CLI and return its exit code.

    Exit codes: 0 embeddable (or census ok), 1 not embeddable, 2 input
    error, 3 unsupported input.
    """
    out = out or sys.stdout
    err = err or sys.stderr
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return EXIT_OK if exc.code == 0 else EXIT_INPUT_ERROR
    handler = {"check": _check, "sample": _sample, "bounds": _bounds}[args.command]
    try:
        return handler(args, out)
    except (ParseError, ValidationError, ValueError) as exc:
        err.write(f"error: {exc}\n")
        return EXIT_INPUT_ERROR
    except EmbedError as exc:
        err.write(f"unsupported: {exc}\n")
        return EXIT_UNSUPPORTED


if __name__ == "__main__":
    sys.exit(main())
