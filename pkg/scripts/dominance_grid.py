"""Certified running time of repetition-with-majority vs the combined lower bound on a (p, delta) grid."""
from __future__ import annotations

import argparse
import time

from _common import emit
from dfcbounds.comp_time import t_lower_combined
from dfcbounds.models import Distortion, FunctionSpec, Marginal, ObservationModel
from dfcbounds.network import bfs_partition, make_topology
from dfcbounds.simulator import empirical_computation_time, parity_repetition

if __name__ == "__main__":
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--p", type=float, nargs="+", default=[0.1, 0.2, 0.3, 0.4])
    ap.add_argument("--delta", type=float, nargs="+", default=[0.05, 0.1, 0.2])
    ap.add_argument("--monte-carlo", action="store_true", help="sample instead of using the closed form")
    ap.add_argument("--samples", type=int, default=100_000)
    ap.add_argument("--seed", type=int, default=0)
    ap.add_argument("--out")
    args = ap.parse_args()
    f, d = FunctionSpec.parity(), Distortion("hamming")
    rows = []
    for p in args.p:
        net = make_topology("two_node", 2, {"kind": "bsc", "p": p})
        model = ObservationModel.iid(net.nodes, Marginal.bernoulli(0.5))
        for delta in args.delta:
            t0 = time.perf_counter()
            emp = empirical_computation_time(net, model, f, d, parity_repetition(), 0.0, delta,
                                             analytic=not args.monte_carlo, samples=args.samples, seed=args.seed)
            low = t_lower_combined(net, model, f, d, 0.0, delta, partition=bfs_partition(net))
            rows.append((p, delta, emp.T, emp.method, f"{low.combined:.4f}", low.combined_integer, low.argmax,
                         f"{time.perf_counter() - t0:.2f}"))
    emit(("p", "delta", "T_empirical", "method", "T_lower", "T_lower_int", "binding", "seconds"), rows, args.out)
