"""Two-node parity over a BSC: cutset-capacity bound vs SDPI bound on I(Z; transcript) as T grows."""
from __future__ import annotations

import argparse

from _common import emit
from dfcbounds.cli import figure_rows

if __name__ == "__main__":
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--p", type=float, default=0.3)
    ap.add_argument("--T-max", type=int, default=15)
    ap.add_argument("--out")
    args = ap.parse_args()
    header, rows = figure_rows("cutset-vs-sdpi", p=args.p, T_max=args.T_max)
    emit(header, [(T, f"{c:.6f}", f"{s:.6f}", w) for T, c, s, w in rows], args.out)
