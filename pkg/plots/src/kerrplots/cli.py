"""Command-line entry point: ``plots <figure-name> --data <dir> --out <file>``."""

from __future__ import annotations

import argparse
import sys
from pathlib import Path

from .figures import RENDERERS, MissingColumnError, MissingInputError, render


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="plots",
        description="Render figures from kerrmc CSV outputs")
    parser.add_argument("figure", choices=sorted(RENDERERS),
                        help="which figure to render")
    parser.add_argument("--data", required=True,
                        help="directory containing the experiment CSVs")
    parser.add_argument("--out", required=True,
                        help="output image path")
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        render(args.figure, Path(args.data), Path(args.out))
    except (MissingColumnError, MissingInputError, ValueError) as exc:
        print("error: %s" % exc, file=sys.stderr)
        return 2
    except Exception as exc:  # noqa: BLE001 - CLI boundary
        print("error: %s" % exc, file=sys.stderr)
        return 1
    return 0


if __name__ == "__main__":
    sys.exit(main())
