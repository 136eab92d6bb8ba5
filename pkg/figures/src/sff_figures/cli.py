"""figures render --kind KIND --in RUN_DIR [--theory FILE] --out IMG"""

from __future__ import annotations

import argparse
import sys
from pathlib import Path

from .io import SchemaError
from .render import KINDS, FigureSpec, render


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="figures")
    sub = parser.add_subparsers(dest="command", required=True)
    p = sub.add_parser("render", help="render one figure from a run directory")
    p.add_argument("--kind", choices=KINDS, required=True)
    p.add_argument("--in", dest="run_dir", type=Path, required=True)
    p.add_argument("--theory", type=Path, default=None, help="theory CSV overlay")
    p.add_argument("--out", type=Path, required=True)
    p.add_argument("--guide-exponent", type=float, default=4.0)
    p.add_argument("--overlays", type=str, default="cue,poisson")
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    spec = FigureSpec(
        run_dir=args.run_dir,
        kind=args.kind,
        out_path=args.out,
        theory_path=args.theory,
        guide_exponent=args.guide_exponent,
        overlays=tuple(s for s in args.overlays.split(",") if s),
    )
    try:
        out = render(spec)
    except SchemaError as exc:
        print(f"schema error: {exc}", file=sys.stderr)
        return 2
    print(out)
    return 0


if __name__ == "__main__":
    sys.exit(main())
