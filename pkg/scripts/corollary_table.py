"""Lower bounds for parity over BSC links on the preset topologies."""
from __future__ import annotations

import argparse

from _common import emit
from dfcbounds.comp_time import corollary_preset


def fmt(x):
    return "inf" if x == float("inf") else f"{x:.4f}"


if __name__ == "__main__":
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--p", type=float, default=0.1)
    ap.add_argument("--delta", type=float, default=0.01)
    ap.add_argument("--out")
    args = ap.parse_args()
    cases = [("chain", 6, None), ("chain", 10, None), ("ring", 6, None), ("ring", 10, None),
             ("grid", 3, None), ("grid", 4, None), ("tree", 4, 3)]
    rows = []
    for kind, size, degree in cases:
        rep = corollary_preset(kind, size, p=args.p, delta=args.delta, degree=degree)
        for e in rep.entries:
            rows.append((kind, size, e.name, fmt(e.value) if e.applicable else "n/a",
                         int(e.asymptotic), ";".join(e.flags)))
    emit(("topology", "size", "entry", "value", "asymptotic", "flags"), rows, args.out)
