"""Command-line front end: qrlab-plots render --kind ... --in ... --out ...

Exit codes: 0 success, 1 usage error, 2 runtime error.
"""

from __future__ import annotations

import argparse
import sys

from .figures import KINDS, FigureError, FigureSpec, render


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(1, f"{self.prog}: error: {message}\n")


def build_parser() -> _Parser:
    parser = _Parser(prog="qrlab-plots", description=__doc__)
    sub = parser.add_subparsers(dest="command", required=True)
    p = sub.add_parser("render", help="render one figure from CSV inputs")
    p.add_argument("--kind", required=True, choices=list(KINDS))
    p.add_argument("--in", dest="inputs", action="append", required=True,
                   help="input CSV; repeat to overlay several files")
    p.add_argument("--out", required=True)
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        out = render(FigureSpec.make(args.kind, args.inputs, args.out))
    except (FigureError, OSError) as exc:
        print(f"qrlab-plots: error: {exc}", file=sys.stderr)
        return 2
    print(out)
    return 0


if __name__ == "__main__":
    sys.exit(main())
