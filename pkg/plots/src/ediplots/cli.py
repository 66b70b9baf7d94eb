"""Command-line front end: `ediplots render`.

Exit codes: 0 success, 1 usage error, 2 rendering/input failure.
"""
from __future__ import annotations

import argparse
import sys
from pathlib import Path

from .errors import EdiPlotsError, UnknownKind
from .figures import render_agreement, render_sweep
from .reader import read_agreement, read_results, sweep_series

KINDS = ("sweep", "agreement")
FORMATS = ("png", "svg", "pdf")


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise UsageError(message)


def build_parser() -> _Parser:
    parser = _Parser(prog="ediplots",
                     description="Render benchmark result CSVs to figures.")
    sub = parser.add_subparsers(dest="command", required=True)
    p = sub.add_parser("render", help="render one CSV to a figure")
    p.add_argument("--input", required=True, help="results or agreement CSV")
    p.add_argument("--kind", required=True, choices=KINDS)
    p.add_argument("--out", required=True, help="output directory")
    p.add_argument("--format", default="png", choices=FORMATS)
    p.add_argument("--title", default=None,
                   help="figure title (default: derived from the input name)")
    return parser


def render(input_path: str, kind: str, out_dir: str, image_format: str = "png",
           title: str | None = None) -> Path:
    """Render one figure; returns the written path."""
    source = Path(input_path)
    if title is None:
        title = source.stem.replace("_", " ")
    target_dir = Path(out_dir)
    target_dir.mkdir(parents=True, exist_ok=True)
    target = target_dir / f"{source.stem}_{kind}.{image_format}"
    if kind == "sweep":
        render_sweep(sweep_series(read_results(source)), target, title=title)
    elif kind == "agreement":
        labels, matrix = read_agreement(source)
        render_agreement(labels, matrix, target, title=title)
    else:
        raise UnknownKind(f"unknown figure kind {kind!r}")
    return target


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
        if not Path(args.input).is_file():
            raise UsageError(f"--input: {args.input} is not a file")
        target = render(args.input, args.kind, args.out, args.format,
                        args.title)
        print(target)
        return 0
    except UsageError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    except EdiPlotsError as exc:
        print(f"error: {type(exc).__name__}: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
