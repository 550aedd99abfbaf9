"""Render one figure per invocation: ``nishimori-figures <figure-id> ...``."""

from __future__ import annotations

import argparse
import sys

from .render import FIGURES


def main(argv=None) -> int:
    parser = argparse.ArgumentParser(
        prog="nishimori-figures",
        description="Render plots from nishimori sweep CSV files.")
    parser.add_argument("figure", choices=sorted(FIGURES))
    parser.add_argument("--input", required=True, help="input CSV path")
    parser.add_argument("--output", required=True, help="output PNG path")
    parser.add_argument("--statistic", default=None,
                        help="f or g where the figure supports both")
    parser.add_argument("--x-col", dest="x_col", default=None,
                        help="sweep axis column for transition curves")
    args = parser.parse_args(argv)
    renderer, _ = FIGURES[args.figure]
    kwargs = {}
    if args.statistic:
        kwargs["statistic"] = args.statistic
    if args.x_col:
        kwargs["x_col"] = args.x_col
    try:
        renderer(args.input, args.output, **kwargs)
    except (ValueError, OSError, TypeError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    print(f"wrote {args.output}")
    return 0


if __name__ == "__main__":
    sys.exit(main())
