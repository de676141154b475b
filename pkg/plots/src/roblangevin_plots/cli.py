"""Console entry points: ``plot-sweep`` and ``plot-loglik``.

Exit codes: 0 ok, 1 bad request or unreadable input.
"""

from __future__ import annotations

import argparse
import sys

from .loglik import plot_loglik_profile
from .sweep import PlotError, PlotSpec, X_COLUMNS, Y_COLUMNS, plot_sweep


def main_sweep(argv: list[str] | None = None) -> int:
    p = argparse.ArgumentParser(
        prog="plot-sweep",
        description="Aggregate a benchmark CSV into per-method sweep curves.",
    )
    p.add_argument("--csv", required=True, help="harness results CSV")
    p.add_argument("--x", required=True, choices=X_COLUMNS)
    p.add_argument("--y", required=True, choices=Y_COLUMNS)
    p.add_argument("--out", required=True, help="output PNG path")
    args = p.parse_args(argv)
    try:
        side = plot_sweep(PlotSpec(csv_path=args.csv, x=args.x, y=args.y, out=args.out))
    except (PlotError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    print(f"wrote {args.out} and {side}")
    return 0


def main_loglik(argv: list[str] | None = None) -> int:
    p = argparse.ArgumentParser(
        prog="plot-loglik",
        description="Sorted per-point log-likelihood curves and histograms.",
    )
    p.add_argument("--in", required=True, dest="inp",
                   help="per-point CSV with columns method,loglik")
    p.add_argument("--out", required=True, help="output PNG path")
    args = p.parse_args(argv)
    try:
        side = plot_loglik_profile(args.inp, args.out)
    except (PlotError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    print(f"wrote {args.out} and {side}")
    return 0
