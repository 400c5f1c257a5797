"""Command line: render one figure kind from an artifact directory."""

from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path

from .figures import BUILDERS, SchemaError, save_figure


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="plots",
        description="Render figures from the debonding simulator's artifacts.")
    parser.add_argument("kind", choices=sorted(BUILDERS),
                        help="figure kind to render")
    parser.add_argument("--in", dest="in_dir", required=True,
                        help="directory holding the CSV/JSON artifacts")
    parser.add_argument("--out", required=True,
                        help="output image path (.png)")
    return parser


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    try:
        fig = BUILDERS[args.kind](Path(args.in_dir))
        save_figure(fig, Path(args.out))
    except SchemaError as exc:
        sys.stderr.write(json.dumps(exc.to_json(), sort_keys=True) + "\n")
        return 1
    return 0


if __name__ == "__main__":
    sys.exit(main())
