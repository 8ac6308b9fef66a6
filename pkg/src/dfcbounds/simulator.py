"""Monte Carlo execution of T-round algorithms with deterministic encoders.

Each round every node maps (own observation, symbols received so far) to
one input symbol per out-edge; all channels then act independently. After
T rounds each node forms an estimate of Z = f(W). Everything is vectorised
across samples: encoders and estimators receive arrays with one entry per
sample.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Callable

import numpy as np
from scipy.stats import binom

from .estimates import clopper_pearson, spawn_rng
from .models import Distortion, FunctionSpec, ObservationModel
from .network import Network

ALGORITHM_KINDS = ("parity_repetition", "chain_relay", "custom")
DEFAULT_CHUNK = 8192
_OBS_STREAM = 0
_NOISE_STREAM = 1

# History maps (src, dst) to an int array of shape (samples, rounds so far).
Encoder = Callable[[str, int, np.ndarray, dict], dict]
Estimator = Callable[[str, np.ndarray, dict], np.ndarray]


class SimulationError(ValueError):
    pass


@dataclass(frozen=True)
class AlgorithmSpec:
    """Per-node encoder and estimator.

    ``encoder(v, t, w_v, history)`` returns {dst: symbols} for the out-edges
    of v at round t (1-based); ``history`` only holds what v has received.
    ``estimator(v, w_v, history)`` returns the estimates after the last round.
    """

    kind: str
    encoder: Encoder
    estimator: Estimator
    params: dict = field(default_factory=dict)

    def __post_init__(self):
        if self.kind not in ALGORITHM_KINDS:
            raise SimulationError(f"unknown algorithm kind {self.kind!r}")


@dataclass
class TrialResult:
    T: int
    samples: int
    seed: int
    failures: dict
    edge_flips: dict = field(default_factory=dict)
    chunk: int = DEFAULT_CHUNK

    def p_hat(self, v) -> float:
        return self.failures[v] / self.samples

    def ci(self, v, level: float = 0.99) -> tuple[float, float]:
        return clopper_pearson(self.failures[v], self.samples, level)

    @property
    def worst_node(self) -> str:
        return max(sorted(self.failures), key=lambda v: self.failures[v])

    @property
    def max_p_hat(self) -> float:
        return self.p_hat(self.worst_node)

    def max_upper(self, level: float = 0.99) -> float:
        return max(self.ci(v, level)[1] for v in self.failures)

    def rows(self) -> list[dict]:
        out = []
        for v in sorted(self.failures, key=lambda v: (len(v), v)):
            lo, hi = self.ci(v)
            out.append({"T": self.T, "node": v, "failures": self.failures[v], "samples": self.samples,
                        "p_hat": self.p_hat(v), "ci_lo": lo, "ci_hi": hi})
        return out


# -- built-in algorithms -----------------------------------------------------

def _majority(votes: np.ndarray) -> np.ndarray:
    """Majority of 0/1 votes per row; erasures (symbol >= 2) abstain; ties go to 0."""
    ones = (votes == 1).sum(axis=1)
    zeros = (votes == 0).sum(axis=1)
    return (ones > zeros).astype(np.int64)


def parity_repetition() -> AlgorithmSpec:
    """Every node repeats its bit on every out-edge; estimates XOR majority decodes."""

    def encoder(v, t, w_v, history):
        return {"*": w_v.astype(np.int64)}

    def estimator(v, w_v, history):
        z = w_v.astype(np.int64).copy()
        for (src, _dst), votes in history.items():
            if votes.shape[1]:
                z ^= _majority(votes)
        return z

    return AlgorithmSpec("parity_repetition", encoder, estimator)


def chain_relay(order: list[str]) -> AlgorithmSpec:
    """Parity along a path: prefix parities flow right, suffix parities flow left.

    With noiseless links every node knows the parity after len(order)-1 rounds.
    """
    pos = {v: i for i, v in enumerate(order)}

    def latest(history, src, dst, n):
        h = history.get((src, dst))
        if h is None or h.shape[1] == 0:
            return np.zeros(n, dtype=np.int64)
        last = h[:, -1]
        return np.where(last == 1, 1, 0).astype(np.int64)

    def encoder(v, t, w_v, history):
        i, n = pos[v], w_v.shape[0]
        w = w_v.astype(np.int64)
        out = {}
        if i + 1 < len(order):
            left = latest(history, order[i - 1], v, n) if i > 0 else 0
            out[order[i + 1]] = w ^ left
        if i > 0:
            right = latest(history, order[i + 1], v, n) if i + 1 < len(order) else 0
            out[order[i - 1]] = w ^ right
        return out

    def estimator(v, w_v, history):
        i, n = pos[v], w_v.shape[0]
        z = w_v.astype(np.int64)
        if i > 0:
            z = z ^ latest(history, order[i - 1], v, n)
        if i + 1 < len(order):
            z = z ^ latest(history, order[i + 1], v, n)
        return z

    return AlgorithmSpec("chain_relay", encoder, estimator, {"order": list(order)})


def path_order(net: Network) -> list[str]:
    """Node order of a bidirectional path network; raises otherwise."""
    nbrs = {v: net.undirected_neighbors(v) for v in net.nodes}
    if not net.is_bidirectional() or len(net.edges) != 2 * (len(net) - 1) or not net.is_connected():
        raise SimulationError("chain_relay needs a bidirectional path network")
    ends = sorted((v for v in net.nodes if len(nbrs[v]) <= 1), key=lambda v: (len(v), v))
    if len(net) > 1 and len(ends) != 2:
        raise SimulationError("chain_relay needs a bidirectional path network")
    order, prev = [ends[0]], None
    while len(order) < len(net):
        nxt = [u for u in nbrs[order[-1]] if u != prev]
        prev = order[-1]
        order.append(nxt[0])
    return order


def make_algorithm(kind: str, net: Network, **kw) -> AlgorithmSpec:
    if kind == "parity_repetition":
        return parity_repetition()
    if kind == "chain_relay":
        return chain_relay(path_order(net))
    if kind == "custom":
        return AlgorithmSpec("custom", kw["encoder"], kw["estimator"], kw.get("params", {}))
    raise SimulationError(f"unknown algorithm kind {kind!r}")


def check_compatible(net: Network, model: ObservationModel, f: FunctionSpec, alg: AlgorithmSpec) -> None:
    if set(net.nodes) != set(model.nodes):
        raise SimulationError("network and observation model have different node sets")
    if alg.kind in ("parity_repetition", "chain_relay"):
        if f.kind != "parity":
            raise SimulationError(f"{alg.kind} computes a parity, got target {f.kind!r}")
        f.check(model)
        for e in net.edges:
            if e.channel.transition.shape[0] < 2:
                raise SimulationError(f"edge {e.key} cannot carry a bit")
    if alg.kind == "parity_repetition":
        for v in net.nodes:
            if {e.src for e in net.in_edges(v)} != set(net.nodes) - {v}:
                raise SimulationError("parity_repetition needs a link from every node to every other node")
    if alg.kind == "chain_relay":
        order = path_order(net)
        if order != alg.params.get("order") and list(reversed(order)) != alg.params.get("order"):
            raise SimulationError("chain_relay order does not match the network")


# -- simulation --------------------------------------------------------------

def _transmit(cdf: np.ndarray, x: np.ndarray, rng: np.random.Generator) -> np.ndarray:
    u = rng.random(x.shape[0])
    if cdf.shape[1] == 1:
        return (u >= cdf[x, 0]).astype(np.int64)
    return (u[:, None] >= cdf[x]).sum(axis=1).astype(np.int64)


def run_algorithm(net: Network, model: ObservationModel, f: FunctionSpec, dist: Distortion,
                  alg: AlgorithmSpec, T: int, samples: int, seed: int = 0, eps: float = 0.0,
                  chunk: int = DEFAULT_CHUNK) -> TrialResult:
    """Simulate ``samples`` independent runs of ``alg`` for T rounds.

    Randomness is keyed by (seed, chunk index, stream, edge index, round), so
    results depend only on the seed and chunk size.
    """
    if T < 0:
        raise SimulationError("T must be nonnegative")
    if samples < 1:
        raise SimulationError("samples must be positive")
    check_compatible(net, model, f, alg)
    nodes = list(model.nodes)
    edges = list(net.edges)
    cdfs = [np.cumsum(e.channel.transition, axis=1)[:, :-1] for e in edges]
    failures = {v: 0 for v in nodes}
    flips = {e.key: [0, 0] for e in edges}
    for c, start in enumerate(range(0, samples, chunk)):
        n = min(chunk, samples - start)
        w = model.sample(spawn_rng(seed, c, _OBS_STREAM), n)
        z = f.evaluate(w)
        buf = {e.key: np.empty((n, T), dtype=np.int64) for e in edges}

        def inbox(v, t):
            # what v has received in rounds 1..t, as views into the buffers
            return {e.key: buf[e.key][:, :t] for e in net.in_edges(v)}

        for t in range(1, T + 1):
            sent = {}
            for v in nodes:
                out = alg.encoder(v, t, w[:, model.index(v)], inbox(v, t - 1))
                for e in net.out_edges(v):
                    x = out.get(e.dst, out.get("*"))
                    if x is None:
                        x = np.zeros(n, dtype=np.int64)
                    x = np.asarray(x, dtype=np.int64)
                    n_in = e.channel.transition.shape[0]
                    if x.shape != (n,) or x.min() < 0 or x.max() >= n_in:
                        raise SimulationError(f"encoder of node {v} sent symbols outside the input "
                                              f"alphabet of edge {e.key}")
                    sent[e.key] = x
            for k, e in enumerate(edges):
                x = sent[e.key]
                y = _transmit(cdfs[k], x, spawn_rng(seed, c, _NOISE_STREAM, k, t))
                flips[e.key][0] += int(np.count_nonzero(y != x))
                flips[e.key][1] += n
                buf[e.key][:, t - 1] = y
        for v in nodes:
            zhat = np.asarray(alg.estimator(v, w[:, model.index(v)], inbox(v, T)))
            failures[v] += int(np.count_nonzero(dist(z, zhat) > eps))
    return TrialResult(T, samples, seed, failures, {k: tuple(v) for k, v in flips.items()}, chunk)


# -- analytic oracle and computation times ----------------------------------

def analytic_repetition_parity(p: float, T: int, p_one: float = 0.5, others: int = 1) -> float:
    """Failure probability of parity repetition over BSC(p) links.

    A link decodes wrongly w.p. P[Bin(T, p) > T/2] plus, for even T, the tie
    mass times P[bit = 1] (ties decode to 0). A node with ``others`` peers
    fails when an odd number of links decode wrongly.
    """
    if T < 0:
        raise ValueError("T must be nonnegative")
    if T == 0:
        q = p_one
    else:
        q = float(binom.sf(T // 2, T, p))
        if T % 2 == 0:
            q += p_one * float(binom.pmf(T // 2, T, p))
    return 0.5 * (1.0 - (1.0 - 2.0 * q) ** others)


@dataclass
class EmpiricalTime:
    """Smallest certified T for a specific scheme; an upper bound on T(eps, delta)."""

    T: float
    method: str
    delta: float
    trace: list = field(default_factory=list)

    @property
    def found(self) -> bool:
        return not math.isinf(self.T)

    def to_dict(self) -> dict:
        return {"T": self.T if self.found else "inf", "method": self.method, "delta": self.delta,
                "note": "achieved by a specific scheme: an upper bound on the optimal computation time"}


def _analytic_params(net: Network, model: ObservationModel) -> tuple[float, float] | None:
    kinds = {(e.channel.kind, e.channel.param) for e in net.edges}
    margs = set(model.marginals)
    if len(kinds) != 1 or len(margs) != 1:
        return None
    kind, p = next(iter(kinds))
    m = next(iter(margs))
    if kind != "bsc" or m.kind not in ("bernoulli",):
        return None
    return float(p), float(m.params[0])


def empirical_computation_time(net: Network, model: ObservationModel, f: FunctionSpec, dist: Distortion,
                               alg: AlgorithmSpec | Callable[[int], AlgorithmSpec], eps: float,
                               delta: float, T_max: int = 1000, samples: int = 100_000, seed: int = 0,
                               analytic: bool = True, T_min: int = 0) -> EmpiricalTime:
    """Smallest T <= T_max whose worst-node failure probability is certified <= delta.

    Sampling certifies with the 99% Clopper-Pearson upper limit; parity
    repetition over identical BSC links uses the exact tail instead.
    """
    if not 0 < delta < 1:
        raise ValueError("delta must lie in (0, 1)")
    factory = alg if callable(alg) and not isinstance(alg, AlgorithmSpec) else (lambda T: alg)
    first = factory(max(T_min, 0))
    if analytic and first.kind == "parity_repetition":
        check_compatible(net, model, f, first)
        params = _analytic_params(net, model)
        if params is not None and eps < 1:
            p, p_one = params
            trace = []
            for T in range(T_min, T_max + 1):
                fail = analytic_repetition_parity(p, T, p_one, len(net) - 1)
                trace.append((T, fail))
                if fail <= delta:
                    return EmpiricalTime(T, "analytic", delta, trace)
            return EmpiricalTime(math.inf, "analytic", delta, trace)
    trace = []
    for T in range(T_min, T_max + 1):
        res = run_algorithm(net, model, f, dist, factory(T), T, samples, seed, eps)
        upper = res.max_upper()
        trace.append((T, res.max_p_hat, upper))
        if upper <= delta:
            return EmpiricalTime(T, "monte_carlo", delta, trace)
    return EmpiricalTime(math.inf, "monte_carlo", delta, trace)
