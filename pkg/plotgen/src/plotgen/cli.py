"""plotgen command line: CSVs in, one deterministic figure file out."""

from __future__ import annotations

import argparse
import sys
from pathlib import Path

from .figures import FIGURES, FigureSpec, render


def main(argv=None) -> int:
    parser = argparse.ArgumentParser(prog="plotgen", description=__doc__)
    parser.add_argument("--figure", required=True, choices=sorted(FIGURES))
    parser.add_argument("--in", dest="inputs", nargs="+", required=True, type=Path)
    parser.add_argument("--out", required=True, type=Path)
    parser.add_argument("--t1", type=int, default=100)
    parser.add_argument("--t2-list", dest="t2_list", default="",
                        help="comma-separated t2 per input, for collapse panels")
    parser.add_argument("--vstar", type=float, default=1.2)
    parser.add_argument("--alpha", type=float, default=0.0)
    parser.add_argument("--linear-y", action="store_true")
    args = parser.parse_args(argv)
    t2_list = [int(tok) for tok in args.t2_list.split(",") if tok]
    spec = FigureSpec(figure=args.figure, inputs=args.inputs, output=args.out,
                      t1=args.t1, t2_list=t2_list, v_star=args.vstar,
                      alpha=args.alpha, log_y=not args.linear_y)
    try:
        out = render(spec)
    except (FileNotFoundError, ValueError) as exc:
        print(f"plotgen: {exc}", file=sys.stderr)
        return 2
    print(out)
    return 0


if __name__ == "__main__":
    sys.exit(main())
