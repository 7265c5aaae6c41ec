"""Command-line wrapper: one panel per invocation.

Exit codes: 0 on success, 2 for anything wrong with the inputs (missing or
malformed CSV, unknown panel, unwritable output).
"""

from __future__ import annotations

import argparse
import sys

from . import PANELS, X_LABELS, PlotInputError, PlotSpec, render


def main(argv: list[str] | None = None) -> int:
    parser = argparse.ArgumentParser(
        prog="plot_results",
        description="Render a median/IQR excess-risk panel from a results CSV.",
    )
    parser.add_argument("--csv", required=True, metavar="FILE",
                        help="results CSV produced by the labelshift harness")
    parser.add_argument("--panel", required=True, choices=sorted(PANELS))
    parser.add_argument("--out", required=True, metavar="FILE",
                        help="output image path (.png or .svg)")
    parser.add_argument("--x-axis", default="", choices=sorted(X_LABELS),
                        help="override the panel's default x-axis")
    scale = parser.add_mutually_exclusive_group()
    scale.add_argument("--log-x", dest="log_x", action="store_true", default=None,
                       help="log-scale the x-axis (the default)")
    scale.add_argument("--linear-x", dest="log_x", action="store_false",
                       help="linear x-axis")
    args = parser.parse_args(argv)

    try:
        spec = PlotSpec(
            input_csv=args.csv,
            panel=args.panel,
            output=args.out,
            x_axis=args.x_axis,
            log_x=args.log_x,
        )
        out = render(spec)
    except (PlotInputError, OSError) as exc:
        print(f"plot_results: {exc}", file=sys.stderr)
        return 2
    print(f"wrote {out}")
    return 0


if __name__ == "__main__":
    sys.exit(main())
