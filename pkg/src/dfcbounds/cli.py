"""Command line front end: ``dfcbounds {bounds,partition,simulate,figures,sdpi}``."""
from __future__ import annotations

import argparse
import csv
import io
import json
import math
import sys
from typing import Sequence

from . import __version__
from .channels import capacity, make_channel, sdpi_constant, sdpi_lower_estimate
from .comp_time import (
    BoundEntry,
    BoundReport,
    CutsetStrategy,
    _jsonable,
    criteria_convert,
    inapplicable,
    t_lower_combined,
    t_lower_rd,
)
from .infotheory import binary_entropy
from .mi_bounds import ChainParams, chain_mi_closed, chain_mi_weakened
from .network import NetworkError, bfs_partition, partition_from_blocks, preset_partition
from .simulator import SimulationError, empirical_computation_time, make_algorithm, run_algorithm
from .specs import ProblemSpec, SpecError, parse_spec

PRESET_PARTITION_KINDS = ("chain", "ring", "grid", "tree")


def fmt_prob(x: float) -> str:
    return f"{x:.6g}"


def fmt_bits(x: float) -> str:
    return f"{x:.6f}"


def fmt_time(x) -> str:
    if x is None:
        return "-"
    if isinstance(x, float) and math.isinf(x):
        return "inf"
    return f"{x:.6g}"


# -- shared helpers ----------------------------------------------------------

def choose_partition(spec: ProblemSpec, root: str | None = None):
    """Partition for the multicut bound; returns (partition or None, note)."""
    choice = spec.query["partition"]
    net = spec.net
    root = root or spec.query.get("root")
    if isinstance(choice, list):
        return partition_from_blocks(net, choice), "user blocks"
    if choice == "none":
        return None, "disabled"
    kind = spec.topology["kind"] if spec.topology else None
    if choice == "preset" or (choice == "auto" and kind in PRESET_PARTITION_KINDS and root is None):
        if kind is None:
            raise SpecError("partition: preset needs a topology preset")
        try:
            return preset_partition(kind, net, degree=spec.topology.get("degree")), f"{kind} preset"
        except NetworkError:
            if choice == "preset":
                raise
    if not net.is_connected():
        return None, "network is disconnected"
    if not net.is_bidirectional():
        return None, "some link is unidirectional"
    return bfs_partition(net, root), "bfs" + (f" from {root}" if root else "")


def _strategy(spec: ProblemSpec, partition) -> CutsetStrategy:
    mode = spec.query["strategy"]
    sets = tuple(spec.query["sets"])
    if mode == "user" and not sets:
        raise SpecError("strategy 'user' needs query.sets")
    return CutsetStrategy(mode, sets, partition)


def _guard(name: str, fn, errors: list) -> list[BoundEntry]:
    try:
        out = fn()
    except Exception as exc:  # reported per method, other methods still run
        errors.append(f"{name}: {exc}")
        return [inapplicable(name, f"error: {exc}")]
    if isinstance(out, BoundReport):
        return out.entries
    return [out]


def cmd_bounds(spec: ProblemSpec) -> tuple[BoundReport, list[str], str]:
    q = spec.query
    eps, delta = q["eps"], q["delta"]
    errors: list[str] = []
    try:
        partition, note = choose_partition(spec)
    except (NetworkError, SpecError) as exc:
        partition, note = None, f"error: {exc}"
        errors.append(f"partition: {exc}")
    strategy = _strategy(spec, partition)
    args = (spec.net, spec.model, spec.f, spec.dist)

    def excess(e, d):
        return t_lower_combined(*args, e, d, strategy, partition, samples=q["samples"], seed=q["seed"])

    report = BoundReport(criterion=q["criterion"])
    if q["criterion"] == "excess":
        report.extend(_guard("excess", lambda: excess(eps, delta), errors))
        if partition is None and "multicut" not in report:
            report.add(inapplicable("multicut", f"no partition ({note})"))
        return report, errors, note
    scale = len(spec.net) if q["criterion"] == "avg" else 1
    target = eps * scale
    for entry in _guard("rate_distortion", lambda: t_lower_rd(*args, target, strategy), errors):
        report.add(entry)

    def converted():
        conv = criteria_convert(lambda e, d: excess(e, d).combined, "max", target)
        return BoundEntry("from_excess", conv["value"],
                          inputs={"delta": conv["delta"], "eps_excess": conv["argument"]},
                          flags=["T_max(eps) >= T(eps/delta, delta), best delta on a grid"])

    report.extend(_guard("from_excess", converted, errors))
    if scale != 1:
        for e in report.entries:
            e.flags.append(f"T_avg(eps) >= T_max(|V| eps), evaluated at {target:g}")
    return report, errors, note


def render_report(report: BoundReport) -> str:
    lines = [f"criterion: {report.criterion}",
             f"{'method':<24}{'T_lower':>12}{'integer':>9}  binding / notes"]
    for e in sorted(report.entries, key=lambda e: e.name):
        if e.applicable:
            note = json.dumps(e.binding, sort_keys=True)
            if e.asymptotic:
                note += "  (asymptotic, not combined)"
            if e.flags:
                note += "  [" + "; ".join(e.flags) + "]"
            lines.append(f"{e.name:<24}{fmt_time(e.value):>12}{fmt_time(e.integer):>9}  {note}")
        else:
            lines.append(f"{e.name:<24}{'n/a':>12}{'-':>9}  {e.reason}")
    lines.append(f"{'combined':<24}{fmt_time(report.combined):>12}{fmt_time(report.combined_integer):>9}"
                 f"  argmax={report.argmax}")
    return "\n".join(lines)


def machine_section(spec: ProblemSpec | None, payload: dict, command: str) -> str:
    body = {"command": command, "version": __version__, "result": _jsonable(payload)}
    if spec is not None:
        body["input"] = spec.to_dict()
        body["seeds"] = {"seed": spec.query["seed"]}
    return "--- machine-readable ---\n" + json.dumps(body, indent=2, sort_keys=True, default=str)


def write_csv(path: str | None, header: Sequence[str], rows: Sequence[Sequence]) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(header)
    for r in rows:
        w.writerow([_csv_cell(x) for x in r])
    text = buf.getvalue()
    if path:
        with open(path, "w", newline="") as fh:
            fh.write(text)
    return text


def _csv_cell(x):
    if isinstance(x, float):
        return "inf" if math.isinf(x) else repr(x)
    if isinstance(x, (list, dict)):
        return json.dumps(x, sort_keys=True)
    return x


# -- partition / simulate / figures / sdpi ------------------------------------

def cmd_partition(spec: ProblemSpec, root: str | None = None):
    part, note = choose_partition(spec, root)
    if part is None:
        raise NetworkError(f"no successive partition: {note}")
    return part, note


def render_partition(part, note: str) -> str:
    lines = [f"partition ({note}): n = {part.n}, Delta = {part.delta}, degree rule = {part.degree_rule}"]
    for i, block in enumerate(part.subsets, start=1):
        ids = sorted(block, key=lambda v: (len(v), v))
        lb = sorted(part.left_bound[i - 1], key=lambda v: (len(v), v))
        d = f"d = {part.degrees[i - 2]} (exact {part.exact_degrees[i - 2]})" if i >= 2 else ""
        lines.append(f"  S_{i} = {{{', '.join(ids)}}}  left-bound {{{', '.join(lb)}}}  {d}".rstrip())
    return "\n".join(lines)


SIM_HEADER = ("T", "node", "failures", "samples", "p_hat", "ci_lo", "ci_hi")


def cmd_simulate(spec: ProblemSpec, alg_kind: str, T: str, samples: int, seed: int,
                 T_max: int = 1000, analytic: bool = True) -> dict:
    q = spec.query
    alg = make_algorithm(alg_kind, spec.net)
    args = (spec.net, spec.model, spec.f, spec.dist)
    if str(T) == "auto":
        emp = empirical_computation_time(*args, alg, q["eps"], q["delta"], T_max=T_max, samples=samples,
                                         seed=seed, analytic=analytic)
        partition, _ = choose_partition(spec)
        lower = t_lower_combined(*args, q["eps"], q["delta"], _strategy(spec, partition), partition,
                                 samples=q["samples"], seed=q["seed"])
        return {"mode": "auto", "empirical": emp.to_dict(), "lower_bound": lower.combined,
                "lower_bound_integer": lower.combined_integer, "rows": []}
    res = run_algorithm(*args, alg, int(T), samples, seed, q["eps"])
    return {"mode": "fixed", "rows": res.rows(), "edge_flips": {f"{u}->{v}": c for (u, v), c in res.edge_flips.items()}}


def figure_rows(which: str, p: float = 0.3, n: int = 8, T_max: int = 10, eta: float = 0.3,
                H: float = 1.0) -> tuple[tuple, list]:
    if which == "cutset-vs-sdpi":
        cap = 1.0 - binary_entropy(p)
        rows = []
        for T in range(1, T_max + 1):
            cut = cap * T
            sd = 1.0 - (4 * p * (1 - p)) ** T
            rows.append((T, cut, sd, "cutset" if cut < sd else "sdpi"))
        return ("T", "cutset_bound", "sdpi_bound", "tighter"), rows
    if which == "chain-exact-vs-weak":
        rows = []
        for T in range(max(n - 1, 1), T_max + 1):
            pr = ChainParams(n, T, eta, H=H)
            rows.append((T, chain_mi_closed(pr).value, chain_mi_weakened(pr).value))
        return ("T", "exact", "weakened"), rows
    raise ValueError(f"unknown figure {which!r}")


def parse_channel_arg(text: str):
    kind, _, rest = text.partition(":")
    if kind in ("bsc", "bec"):
        return make_channel({"kind": kind, "p": float(rest)})
    raise ValueError(f"channel must look like bsc:0.3 or bec:0.1, got {text!r}")


def cmd_sdpi(channels, resolution: float = 1e-3) -> list[dict]:
    out = []
    for label, ch in channels:
        eta, source = sdpi_constant(ch)
        est = sdpi_lower_estimate(ch, resolution=resolution)
        out.append({"channel": label, "capacity": capacity(ch), "eta": eta, "eta_source": source,
                    "eta_numeric_lower": est})
    return out


# -- argument parsing ----------------------------------------------------------

def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="dfcbounds", description=__doc__)
    ap.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = ap.add_subparsers(dest="command", required=True)

    def common(p, sim=False):
        p.add_argument("--spec", required=True, help="problem file (YAML or JSON)")
        p.add_argument("--eps", type=float)
        p.add_argument("--delta", type=float)
        p.add_argument("--samples", type=int)
        p.add_argument("--seed", type=int)
        p.add_argument("--out", help="write CSV here")
        p.add_argument("--lenient", action="store_true", help="ignore unknown keys in the problem file")

    b = sub.add_parser("bounds", help="lower bounds on the computation time")
    common(b)
    b.add_argument("--criterion", choices=("excess", "max", "avg"))
    b.add_argument("--strategy", choices=("default", "all", "singleton_complements", "singletons",
                                          "partition_prefixes", "user"))

    pa = sub.add_parser("partition", help="successive partition with block statistics")
    pa.add_argument("--spec", required=True)
    pa.add_argument("--root")
    pa.add_argument("--lenient", action="store_true")

    s = sub.add_parser("simulate", help="Monte Carlo runs of a built-in scheme")
    common(s)
    s.add_argument("--alg", required=True, choices=("parity_repetition", "chain_relay"))
    s.add_argument("--T", default="auto", help="number of rounds or 'auto'")
    s.add_argument("--T-max", type=int, default=1000)
    s.add_argument("--no-analytic", action="store_true", help="always sample, even when a closed form exists")

    f = sub.add_parser("figures", help="CSV curves for the comparison figures")
    f.add_argument("which", choices=("cutset-vs-sdpi", "chain-exact-vs-weak"))
    f.add_argument("--p", type=float, default=0.3)
    f.add_argument("--n", type=int, default=8)
    f.add_argument("--T-max", type=int, default=None)
    f.add_argument("--eta", type=float, default=0.3)
    f.add_argument("--out")

    d = sub.add_parser("sdpi", help="capacity and SDPI diagnostics for channels")
    g = d.add_mutually_exclusive_group(required=True)
    g.add_argument("--channel", action="append", help="bsc:P or bec:P (repeatable)")
    g.add_argument("--spec")
    d.add_argument("--resolution", type=float, default=1e-3)
    return ap


def _load(args) -> ProblemSpec:
    spec = parse_spec(args.spec, strict=not args.lenient)
    for key in ("eps", "delta", "samples", "seed", "criterion", "strategy"):
        val = getattr(args, key, None)
        if val is not None:
            spec.query[key] = val
    return spec


def main(argv: Sequence[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    out = sys.stdout
    try:
        if args.command == "bounds":
            spec = _load(args)
            report, errors, note = cmd_bounds(spec)
            print(render_report(report), file=out)
            print(f"partition: {note}", file=out)
            for msg in errors:
                print(f"error: {msg}", file=out)
            print(machine_section(spec, {**report.to_dict(), "partition": note, "errors": errors}, "bounds"),
                  file=out)
            if args.out:
                write_csv(args.out, ("method", "value", "integer", "applicable", "asymptotic", "binding", "flags"),
                          [(e.name, e.value, e.integer, e.applicable, e.asymptotic, e.binding, e.flags)
                           for e in sorted(report.entries, key=lambda e: e.name)])
            return 1 if errors else 0
        if args.command == "partition":
            spec = parse_spec(args.spec, strict=not args.lenient)
            part, note = cmd_partition(spec, args.root)
            print(render_partition(part, note), file=out)
            print(machine_section(spec, part.to_dict(), "partition"), file=out)
            return 0
        if args.command == "simulate":
            spec = _load(args)
            samples = spec.query["samples"] if args.samples is None else args.samples
            seed = spec.query["seed"]
            res = cmd_simulate(spec, args.alg, args.T, samples, seed, args.T_max, not args.no_analytic)
            if res["mode"] == "auto":
                emp = res["empirical"]
                print(f"empirical T = {emp['T']} ({emp['method']}, an upper bound on the optimum)"
                      f"    lower bound T >= {fmt_time(res['lower_bound_integer'])}"
                      f" ({fmt_time(res['lower_bound'])})", file=out)
            else:
                text = write_csv(args.out, SIM_HEADER, [[r[k] for k in SIM_HEADER] for r in res["rows"]])
                print(text, end="", file=out)
            print(machine_section(spec, res, "simulate"), file=out)
            return 0
        if args.command == "figures":
            T_max = args.T_max or (10 if args.which == "cutset-vs-sdpi" else 40)
            header, rows = figure_rows(args.which, p=args.p, n=args.n, T_max=T_max, eta=args.eta)
            print(write_csv(args.out, header, rows), end="", file=out)
            return 0
        if args.command == "sdpi":
            if args.spec:
                spec = parse_spec(args.spec, strict=False)
                seen = {}
                for e in spec.net.edges:
                    seen.setdefault(repr(e.channel), e.channel)
                chans = sorted(seen.items())
            else:
                chans = [(c, parse_channel_arg(c)) for c in args.channel]
            rows = cmd_sdpi(chans, args.resolution)
            print(f"{'channel':<16}{'capacity':>12}{'eta':>12}{'source':>14}{'numeric':>12}", file=out)
            for r in rows:
                print(f"{r['channel']:<16}{fmt_bits(r['capacity']):>12}{fmt_prob(r['eta']):>12}"
                      f"{r['eta_source']:>14}{fmt_prob(r['eta_numeric_lower']):>12}", file=out)
            print(machine_section(None, {"channels": rows}, "sdpi"), file=out)
            return 0
    except (SpecError, NetworkError, SimulationError, ValueError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    return 2


if __name__ == "__main__":  # pragma: no cover
    sys.exit(main())
