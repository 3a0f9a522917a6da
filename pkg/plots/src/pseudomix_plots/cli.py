"""plots <figure-id> --in <csv> --out <image> [--q <rational>]"""

from __future__ import annotations

import argparse
import sys
from fractions import Fraction

from .figures import FIGURE_IDS, FigureSpec, SchemaError, render


def parse_and_dispatch(argv: list[str]) -> int:
    parser = argparse.ArgumentParser(
        prog="plots", description="Render figures from experiment CSVs."
    )
    parser.add_argument("figure_id", choices=FIGURE_IDS)
    parser.add_argument("--in", dest="inputs", nargs="+", required=True,
                        help="input CSV path(s)")
    parser.add_argument("--out", required=True, help="output image path")
    parser.add_argument("--q", default="3/20",
                        help='tolerance for stair-step markers, e.g. "0.15"')
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return 0 if exc.code in (0, None) else 1
    try:
        q = Fraction(args.q)
        spec = FigureSpec(args.figure_id, tuple(args.inputs), args.out)
        render(spec, q)
    except (SchemaError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except OSError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 3
    return 0


def main() -> None:
    sys.exit(parse_and_dispatch(sys.argv[1:]))


if __name__ == "__main__":
    main()
