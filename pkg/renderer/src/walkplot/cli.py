"""Command-line renderer: one figure per invocation.

    walkplot --kind convergence --in estimates.csv --rate rate.csv \
             --haar 7.0686 --out convergence.png

Exit codes: 0 on success (including header-only inputs, which produce a
"no data" figure), 1 on argument problems, 2 on schema mismatches or
unreadable inputs.
"""

from __future__ import annotations

import argparse
import sys

from .csvio import SchemaError
from .figures import FigureSpec, render

EXIT_OK = 0
EXIT_USAGE = 1
EXIT_SCHEMA = 2


def _build_parser():
    parser = argparse.ArgumentParser(
        prog="walkplot",
        description="Render latticewalk CSV results into figures")
    parser.add_argument("--kind", required=True,
                        choices=("convergence", "tails", "lyapunov",
                                 "density"))
    parser.add_argument("--in", dest="inputs", action="append", required=True,
                        help="input CSV (repeatable for tails overlays)")
    parser.add_argument("--out", required=True, help="output image path")
    parser.add_argument("--haar", type=float, default=None,
                        help="reference Haar mean for convergence deviation")
    parser.add_argument("--rate", default=None,
                        help="rate CSV with fitted exponentials")
    parser.add_argument("--title", default="")
    return parser


def cli_dispatch(argv) -> int:
    try:
        args = _build_parser().parse_args(argv)
    except SystemExit as err:
        return EXIT_USAGE if err.code else EXIT_OK
    spec = FigureSpec(kind=args.kind, inputs=tuple(args.inputs),
                      out=args.out, haar_mean=args.haar,
                      rate_path=args.rate, title=args.title)
    try:
        render(spec)
    except SchemaError as err:
        print(f"schema error: {err}", file=sys.stderr)
        return EXIT_SCHEMA
    except OSError as err:
        print(f"error: {err}", file=sys.stderr)
        return EXIT_SCHEMA
    print(f"wrote {spec.out}", file=sys.stderr)
    return EXIT_OK


def main() -> None:
    sys.exit(cli_dispatch(sys.argv[1:]))


if __name__ == "__main__":
    main()
