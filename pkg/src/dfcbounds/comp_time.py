"""Computation-time lower bounds obtained by inverting MI upper bounds
against MI lower bounds, over single cutsets and successive partitions."""
from __future__ import annotations

import itertools
import math
from dataclasses import dataclass, field
from typing import Callable, Iterable, Sequence

import numpy as np

from .channels import capacity, sdpi_constant
from .concentration import _prob_one, discrete_sum_pmf, expected_csbp
from .estimates import Estimate
from .infotheory import binary_entropy, entropy
from .mi_bounds import (
    ChainParams,
    chain_closed_C,
    chain_closed_H,
    chain_mi_chernoff,
    chain_mi_weakened,
    etas_from_degrees,
    mi_lower_gaussian_quadratic,
    mi_lower_smallball,
    rd_function_discrete,
)
from .models import Distortion, FunctionSpec, Marginal, ModelError, ObservationModel
from .network import (
    Network,
    SuccessivePartition,
    cutset_capacity,
    make_topology,
    node_sdpi,
    preset_partition,
)

T_SEARCH_CAP = 10 ** 6
ALL_SUBSETS_MAX_NODES = 16
_INT_TOL = 1e-9


# -- report types ------------------------------------------------------------

def ceil_time(value: float) -> float:
    """Smallest integer T with T >= value (0 for nonpositive values)."""
    if math.isinf(value):
        return value
    if value <= 0:
        return 0
    return int(math.ceil(value - _INT_TOL))


@dataclass
class BoundEntry:
    """One lower bound on a computation time.

    ``asymptotic`` entries are large-n approximations; they are reported but
    never enter the combined maximum.
    """

    name: str
    value: float
    applicable: bool = True
    binding: dict = field(default_factory=dict)
    flags: list = field(default_factory=list)
    inputs: dict = field(default_factory=dict)
    components: dict = field(default_factory=dict)
    asymptotic: bool = False
    reason: str = ""

    @property
    def integer(self):
        return ceil_time(self.value) if self.applicable else None

    def to_dict(self) -> dict:
        return {
            "name": self.name,
            "value": _jsonable(self.value),
            "integer": _jsonable(self.integer),
            "applicable": self.applicable,
            "asymptotic": self.asymptotic,
            "binding": self.binding,
            "flags": list(self.flags),
            "reason": self.reason,
            "inputs": {k: _jsonable(v) for k, v in self.inputs.items()},
            "components": {k: _jsonable(v) for k, v in self.components.items()},
        }


def _jsonable(x):
    if isinstance(x, float) and math.isinf(x):
        return "inf" if x > 0 else "-inf"
    if isinstance(x, (np.floating, np.integer)):
        return _jsonable(x.item())
    if isinstance(x, dict):
        return {k: _jsonable(v) for k, v in x.items()}
    if isinstance(x, (list, tuple)):
        return [_jsonable(v) for v in x]
    return x


def inapplicable(name: str, reason: str, **kw) -> BoundEntry:
    return BoundEntry(name, 0.0, applicable=False, reason=reason, **kw)


@dataclass
class BoundReport:
    entries: list = field(default_factory=list)
    criterion: str = "excess"

    def add(self, entry: BoundEntry) -> "BoundReport":
        self.entries.append(entry)
        return self

    def extend(self, entries: Iterable[BoundEntry]) -> "BoundReport":
        self.entries.extend(entries)
        return self

    def __getitem__(self, name: str) -> BoundEntry:
        for e in self.entries:
            if e.name == name:
                return e
        raise KeyError(name)

    def __contains__(self, name: str) -> bool:
        return any(e.name == name for e in self.entries)

    @property
    def counted(self) -> list:
        return [e for e in self.entries if e.applicable and not e.asymptotic]

    @property
    def combined(self) -> float:
        vals = [e.value for e in self.counted]
        return max([0.0] + vals)

    @property
    def argmax(self) -> str | None:
        best = None
        for e in sorted(self.counted, key=lambda e: e.name):
            if best is None or e.value > best.value:
                best = e
        return best.name if best else None

    @property
    def combined_integer(self):
        return ceil_time(self.combined)

    def to_dict(self) -> dict:
        return {
            "criterion": self.criterion,
            "combined": _jsonable(self.combined),
            "combined_integer": _jsonable(self.combined_integer),
            "argmax": self.argmax,
            "entries": [e.to_dict() for e in sorted(self.entries, key=lambda e: e.name)],
        }


# -- candidate sets ----------------------------------------------------------

STRATEGY_MODES = ("default", "all", "singleton_complements", "singletons", "partition_prefixes", "user")


@dataclass(frozen=True)
class CutsetStrategy:
    mode: str = "default"
    user_sets: tuple = ()
    partition: SuccessivePartition | None = None

    def __post_init__(self):
        if self.mode not in STRATEGY_MODES:
            raise ValueError(f"unknown strategy {self.mode!r}")
        object.__setattr__(self, "user_sets", tuple(frozenset(str(v) for v in s) for s in self.user_sets))

    def candidates(self, net: Network) -> list[frozenset]:
        nodes = list(net.nodes)
        full = frozenset(nodes)
        out: list[frozenset] = []
        mode = self.mode
        if mode == "default" and len(nodes) <= ALL_SUBSETS_MAX_NODES:
            mode = "all"
        if mode == "all":
            for r in range(1, len(nodes)):
                out.extend(frozenset(c) for c in itertools.combinations(nodes, r))
        else:
            if mode in ("default", "singleton_complements"):
                out.extend(full - {v} for v in nodes)
            if mode in ("default", "singletons"):
                out.extend(frozenset({v}) for v in nodes)
            if mode in ("default", "partition_prefixes") and self.partition is not None:
                for p in self.partition.nested:
                    out.extend([p, full - p])
            if mode in ("default", "user"):
                out.extend(self.user_sets)
        seen, uniq = set(), []
        for s in out:
            if s and s != full and s not in seen:
                if not s <= full:
                    raise ValueError(f"candidate set {sorted(s)} has unknown nodes")
                seen.add(s)
                uniq.append(s)
        if not uniq:
            raise ValueError("strategy produced no candidate sets")
        return uniq


def _as_strategy(strategy) -> CutsetStrategy:
    if strategy is None:
        return CutsetStrategy()
    if isinstance(strategy, CutsetStrategy):
        return strategy
    if isinstance(strategy, str):
        return CutsetStrategy(strategy)
    return CutsetStrategy("user", tuple(strategy))


def _sorted_ids(s) -> list[str]:
    return sorted(s, key=lambda v: (len(v), v))


# -- model quantities --------------------------------------------------------

class _Quantities:
    """Memoized per-set quantities for one (network, model, f, distortion)."""

    def __init__(self, net, model, f, dist, samples=200_000, seed=0):
        if set(net.nodes) != set(model.nodes):
            raise ModelError("network and observation model have different node sets")
        f.check(model)
        self.net, self.model, self.f, self.dist = net, model, f, dist
        self.samples, self.seed = samples, seed
        self._csbp: dict = {}
        self._cap: dict = {}

    def csbp(self, S: frozenset, eps: float) -> Estimate:
        key = (S, eps)
        if key not in self._csbp:
            self._csbp[key] = expected_csbp(self.model, self.f, self.dist, S, eps,
                                            samples=self.samples, seed=self.seed)
        return self._csbp[key]

    def cap(self, S: frozenset) -> float:
        if S not in self._cap:
            self._cap[S] = cutset_capacity(self.net, S)
        return self._cap[S]

    def cond_entropy(self, S: frozenset) -> float | None:
        """H(W_{S^c} | W_S) for independent discrete observations."""
        if not self.model.is_discrete:
            return None
        return float(sum(self.model.marginal(v).entropy() for v in self.model.nodes if v not in S))


def _ell(q: _Quantities, S: frozenset, eps: float, delta: float):
    est = q.csbp(S, eps)
    return est, mi_lower_smallball(est.value, delta)


# -- single-cutset bounds ----------------------------------------------------

def t_lower_cutset(net: Network, model: ObservationModel, f: FunctionSpec, dist: Distortion,
                   eps: float, delta: float, strategy=None, _q: _Quantities | None = None,
                   name: str = "cutset") -> BoundEntry:
    """max_S l(S, eps, delta) / C_S over candidates that meet E[L] <= 1 - delta."""
    q = _q or _Quantities(net, model, f, dist)
    cands = _as_strategy(strategy).candidates(net)
    best, best_S, checked, passed = -math.inf, None, 0, 0
    best_info = {}
    for S in cands:
        checked += 1
        est, ell = _ell(q, S, eps, delta)
        if not ell.valid:
            continue
        passed += 1
        cs = q.cap(S)
        if ell.value <= 0:
            val = 0.0
        elif cs == 0:
            val = math.inf
        else:
            val = ell.value / cs
        if val > best:
            best, best_S = val, S
            best_info = {"ell": ell.value, "C_S": cs, "expected_L": est.value, "csbp_method": est.method}
    flags = [f"condition checked on {checked} candidate sets"]
    if passed == 0:
        return inapplicable(name, "E[L(W_S, eps)] > 1 - delta on every candidate set", flags=flags,
                            inputs={"eps": eps, "delta": delta})
    return BoundEntry(name, max(best, 0.0), binding={"S": _sorted_ids(best_S)}, flags=flags,
                      inputs={"eps": eps, "delta": delta, **best_info})


def t_lower_sdpi_single(net: Network, model: ObservationModel, f: FunctionSpec, dist: Distortion,
                        eps: float, delta: float, strategy=None, _q: _Quantities | None = None,
                        name: str = "sdpi_single") -> BoundEntry:
    """max_{S, v in S} log(1/(1 - l/H)) / (|E_v| log(1/(1 - eta*_v)))."""
    q = _q or _Quantities(net, model, f, dist)
    if not model.is_discrete:
        return inapplicable(name, "H(W_{S^c}|W_S) is undefined for continuous observations")
    sdpi = {v: node_sdpi(net, v) for v in net.nodes}
    cands = _as_strategy(strategy).candidates(net)
    best, arg, passed, flags = -math.inf, None, 0, []
    info = {}
    for S in cands:
        est, ell = _ell(q, S, eps, delta)
        if not ell.valid:
            continue
        passed += 1
        H = q.cond_entropy(S)
        for v in _sorted_ids(S):
            ns = sdpi[v]
            if ell.value <= 0:
                val = 0.0
            elif ell.value >= H:
                val = math.inf
                if "l_ge_H" not in flags:
                    flags.append("l_ge_H")
            elif ns.in_degree == 0 or ns.eta_star == 0.0:
                val = math.inf
            elif ns.eta_star >= 1.0:
                val = 0.0
            else:
                val = math.log2(1.0 / (1.0 - ell.value / H)) / (ns.in_degree * math.log2(1.0 / (1.0 - ns.eta_star)))
            if val > best:
                best, arg = val, (S, v)
                info = {"ell": ell.value, "H": H, "eta_star": ns.eta_star, "in_degree": ns.in_degree,
                        "expected_L": est.value, "eta_exact": ns.exact}
    if passed == 0:
        return inapplicable(name, "E[L(W_S, eps)] > 1 - delta on every candidate set",
                            inputs={"eps": eps, "delta": delta})
    if not info.get("eta_exact", True):
        flags.append("eta_conservative")
    return BoundEntry(name, max(best, 0.0), binding={"S": _sorted_ids(arg[0]), "v": arg[1]}, flags=flags,
                      inputs={"eps": eps, "delta": delta, **info})


def t_lower_combined(net: Network, model: ObservationModel, f: FunctionSpec, dist: Distortion,
                     eps: float, delta: float, strategy=None, partition: SuccessivePartition | None = None,
                     samples: int = 200_000, seed: int = 0) -> BoundReport:
    """Single-cutset capacity and SDPI bounds, plus the multicut bound when a partition is given."""
    q = _Quantities(net, model, f, dist, samples=samples, seed=seed)
    rep = BoundReport(criterion="excess")
    rep.add(t_lower_cutset(net, model, f, dist, eps, delta, strategy, _q=q))
    rep.add(t_lower_sdpi_single(net, model, f, dist, eps, delta, strategy, _q=q))
    if partition is not None:
        rep.add(t_lower_multicut(net, partition, model, f, dist, eps, delta, _q=q))
    return rep


# -- rate-distortion bound (expected distortion criterion) -------------------

def _linear_gaussian(model: ObservationModel, f: FunctionSpec) -> bool:
    return f.kind == "linear" and all(m.kind == "gaussian" for m in model.marginals)


def _parity_one(marginals) -> float:
    """P[sum of independent bits is odd]."""
    return 0.5 * (1.0 - math.prod(1.0 - 2.0 * _prob_one(m) for m in marginals))


def _discrete_target(model, f) -> tuple[np.ndarray, np.ndarray] | None:
    if not model.is_discrete:
        return None
    if f.kind == "linear":
        return discrete_sum_pmf(list(zip(f.coefficients, model.marginals)))
    if f.kind == "parity":
        q = _parity_one(model.marginals)
        return np.array([0.0, 1.0]), np.array([1 - q, q])
    return None


def rd_numerator(model: ObservationModel, f: FunctionSpec, dist: Distortion, S: frozenset,
                 eps: float) -> tuple[float, dict] | None:
    """R_Z(eps) - I(Z; W_S), or the Gaussian-quadratic form; None when not computable."""
    S = frozenset(str(v) for v in S)
    free = [i for i, v in enumerate(model.nodes) if v not in S]
    if _linear_gaussian(model, f) and dist.kind == "quadratic":
        var = sum(f.coefficients[i] ** 2 * model.marginals[i].params[1] for i in free)
        if var == 0:
            return -math.inf, {"h_cond": -math.inf}
        h_cond = 0.5 * math.log2(2 * math.pi * math.e * var)
        return mi_lower_gaussian_quadratic(h_cond, eps), {"h_cond": h_cond, "var_cond": var}
    target = _discrete_target(model, f)
    if target is None or dist.kind != "hamming":
        return None
    values, pmf = target
    d = 1.0 - np.eye(values.size)
    rate = rd_function_discrete(pmf, d, eps)
    if f.kind == "linear":
        terms = [(f.coefficients[i], model.marginals[i]) for i in free if f.coefficients[i] != 0]
        h_cond = entropy(discrete_sum_pmf(terms)[1]) if terms else 0.0
    else:
        h_cond = binary_entropy(_parity_one([model.marginals[i] for i in free]))
    mi = entropy(pmf) - h_cond
    return rate - mi, {"rate": rate, "I_Z_WS": mi}


def t_lower_rd(net: Network, model: ObservationModel, f: FunctionSpec, dist: Distortion,
               eps: float, strategy=None, name: str = "rate_distortion") -> BoundEntry:
    """max_S (R_Z(eps) - I(Z; W_S)) / C_S, a bound on T_max(eps)."""
    cands = _as_strategy(strategy).candidates(net)
    best, best_S, info = -math.inf, None, {}
    for S in cands:
        res = rd_numerator(model, f, dist, S, eps)
        if res is None:
            return inapplicable(name, "R_Z and I(Z;W_S) are not computable for this model",
                                inputs={"eps": eps})
        num, parts = res
        cs = cutset_capacity(net, S)
        if num <= 0:
            val = 0.0
        elif cs == 0:
            val = math.inf
        else:
            val = num / cs
        if val > best:
            best, best_S, info = val, S, {"numerator": num, "C_S": cs, **parts}
    return BoundEntry(name, max(best, 0.0), binding={"S": _sorted_ids(best_S)},
                      inputs={"eps": eps, **info}, flags=["criterion: expected distortion"])


# -- multicut ----------------------------------------------------------------

def _smallest_T(pred: Callable[[int], bool], start: int = 0, cap: int = T_SEARCH_CAP) -> float:
    """Smallest integer T >= start with pred(T), for a monotone predicate."""
    if pred(start):
        return start
    lo, hi = start, max(start + 1, 1)
    while not pred(hi):
        lo = hi
        hi *= 2
        if hi > cap:
            if pred(cap):
                hi = cap
                break
            return math.inf
    while hi - lo > 1:
        mid = (lo + hi) // 2
        if pred(mid):
            hi = mid
        else:
            lo = mid
    return hi


def _edge_eta(net: Network) -> tuple[float, bool]:
    vals = [sdpi_constant(e.channel) for e in net.edges]
    if not vals:
        return 0.0, True
    return max(v for v, _ in vals), all(flag == "exact" for _, flag in vals)


def t_lower_multicut(net: Network, partition: SuccessivePartition, model: ObservationModel,
                     f: FunctionSpec, dist: Distortion, eps: float, delta: float,
                     eta: float | None = None, H: float | None = None,
                     _q: _Quantities | None = None, name: str = "multicut") -> BoundEntry:
    """Lower bound through the chain obtained from a successive partition.

    Components: ``chain_exact`` (binomial-sum forms inverted over integer T),
    ``chain_per_degree`` (product form with per-block d_i), ``weakened_sdpi``
    (explicit log form), ``cutset_plus`` (l / C + n - 2), ``chernoff`` (best
    gamma on a grid) and ``large_n`` (threshold 2 + (n-3)/(2 eta~) when its
    condition holds). The entry value is their maximum.
    """
    q = _q or _Quantities(net, model, f, dist)
    n = partition.n
    S1 = partition.subsets[0]
    S1c = frozenset(net.nodes) - S1
    for i, lb in enumerate(partition.left_bound, start=1):
        if not lb:
            return inapplicable(name, f"block S_{i} has no left-bound node")
    est, ell_rec = _ell(q, S1c, eps, delta)
    inputs = {"eps": eps, "delta": delta, "n": n, "Delta": partition.delta,
              "degrees": list(partition.degrees), "expected_L": est.value}
    if not ell_rec.valid:
        return inapplicable(name, "E[L(W_{S1^c}, eps)] > 1 - delta", inputs=inputs)
    ell = ell_rec.value
    flags = []
    if eta is None:
        eta, exact = _edge_eta(net)
        if not exact:
            flags.append("eta_conservative")
    if H is None:
        H = q.cond_entropy(S1c)
    C = q.cap(S1c)
    eta_t = 1.0 - (1.0 - eta) ** partition.delta
    inputs.update({"ell": ell, "eta": eta, "eta_tilde": eta_t, "H": H, "C": C})
    comps: dict = {}
    if ell <= 0:
        return BoundEntry(name, 0.0, binding={"partition": [_sorted_ids(s) for s in partition.subsets]},
                          flags=flags + ["vacuous: l <= 0"], inputs=inputs)

    # exact binomial forms: both inequalities must hold at T(eps, delta)
    use_H = H is not None and ell < H
    if H is not None and not use_H:
        flags.append("h_form_saturated")

    def exact_ok(T: int) -> bool:
        if T <= n - 2:
            return False
        ok = chain_closed_C(n, T, eta_t, C) >= ell
        if use_H:
            ok = ok and chain_closed_H(n, T, eta_t, H) >= ell
        return ok

    comps["chain_exact"] = math.inf if C == math.inf else _smallest_T(exact_ok, start=n - 1)
    etas_d = etas_from_degrees(eta, partition.degrees)

    def per_degree_ok(T: int) -> bool:
        if T <= n - 2:
            return False
        params = ChainParams(n, T, etas_d, H=H if use_H else None, C=C)
        forms = chain_mi_weakened(params).forms
        return all(v >= ell for v in forms.values())

    comps["chain_per_degree"] = _smallest_T(per_degree_ok, start=n - 1)
    if use_H:
        if eta <= 0.0:
            comps["weakened_sdpi"] = math.inf
        elif eta >= 1.0:
            comps["weakened_sdpi"] = float(n - 2)
        else:
            root = (ell / H) ** (1.0 / (n - 1))
            comps["weakened_sdpi"] = (math.log2(1.0 / (1.0 - root))
                                      / (partition.delta * math.log2(1.0 / (1.0 - eta))) + n - 2)
    comps["cutset_plus"] = (math.inf if C == 0 else ell / C) + (n - 2)
    if n >= 4 and 0 < eta_t:
        best_g = None
        for gamma in np.round(np.arange(0.1, 1.0, 0.1), 10):
            T_edge = 2 + (n - 3) * gamma / eta_t
            val = chain_mi_chernoff(n, int(math.floor(T_edge)), eta_t, float(gamma), C)
            if val is not None and val < ell and (best_g is None or T_edge > best_g[1]):
                best_g = (float(gamma), T_edge)
        if best_g is not None:
            # the bound fails for every T <= T_edge, so T exceeds floor(T_edge)
            comps["chernoff"] = math.floor(best_g[1]) + 1
            inputs["chernoff_gamma"] = best_g[0]
    if n >= 4 and eta > 0:
        c_edge = max(capacity(e.channel) for e in net.edges)
        lhs = c_edge * len(net) ** 2 * (n - 3) ** 2 / (4 * eta) * math.exp(-2 * eta ** 2 * (n - 3))
        inputs["large_n_lhs"] = lhs
        if lhs < ell:
            comps["large_n"] = 2 + (n - 3) / (2 * eta_t)
        else:
            flags.append("large_n condition not met")
    value = max(comps.values())
    return BoundEntry(name, value, binding={"partition": [_sorted_ids(s) for s in partition.subsets]},
                      flags=flags, inputs=inputs, components=comps)


# -- corollary presets -------------------------------------------------------

_COROLLARY_FACTORS = {
    # (cutset edge count, SDPI denominator factor as a function of n and d)
    "chain": (1, lambda n, d: 2),
    "ring": (2, lambda n, d: 4),
    "grid": (2, lambda n, d: 2 * (n - 1)),
    "tree": (1, lambda n, d: d),
}


@dataclass
class Problem:
    net: Network
    model: ObservationModel
    f: FunctionSpec
    dist: Distortion


def preset_problem(kind: str, size: int, p: float, degree: int | None = None) -> Problem:
    """Preset topology of BSC(p) links computing the parity of fair bits."""
    net = make_topology(kind, size, {"kind": "bsc", "p": p}, degree=degree)
    model = ObservationModel.iid(net.nodes, Marginal.bernoulli(0.5))
    return Problem(net, model, FunctionSpec.parity(), Distortion("hamming"))


def corollary_preset(kind: str, size: int = 4, p: float = 0.3, eps: float = 0.0, delta: float = 0.1,
                     degree: int | None = None, problem: Problem | None = None,
                     B_samples: int = 200_000) -> BoundReport:
    """Evaluate a per-topology corollary.

    chain/ring/grid/tree: multicut bound on the preset partition, the
    single cutset S = V minus node 1, and the printed BSC closed form (an
    asymptotic entry). dumbbell: Rademacher sum with the bridge cutset.
    averaging: Gaussian average under quadratic loss via T_avg(eps) >= T_max(|V| eps).
    """
    rep = BoundReport()
    if kind in _COROLLARY_FACTORS:
        prob = problem or preset_problem(kind, size, p, degree)
        net = prob.net
        part = preset_partition(kind, net, degree=degree)
        q = _Quantities(net, prob.model, prob.f, prob.dist)
        S = frozenset(net.nodes) - {"1"}
        rep.add(t_lower_multicut(net, part, prob.model, prob.f, prob.dist, eps, delta, _q=q))
        rep.add(t_lower_cutset(net, prob.model, prob.f, prob.dist, eps, delta, [S], _q=q, name="cutset_V_minus_1"))
        est, ell = _ell(q, S, eps, delta)
        H = q.cond_entropy(S)
        n = part.n
        k_edges, factor = _COROLLARY_FACTORS[kind]
        d = part.delta
        closed = inapplicable("corollary_closed_form", "needs BSC links, l > 0 and l < H")
        if ell.valid and ell.value > 0 and H and ell.value < H and 0 < p < 0.5:
            cap = 1 - binary_entropy(p)
            a = ell.value / (k_edges * cap)
            b = (math.log2(n - 1) + math.log2(1 / (1 - ell.value / H))) / (factor(n, d) * math.log2(1 / (4 * p * (1 - p))))
            closed = BoundEntry("corollary_closed_form", max(a, b) + n - 2, asymptotic=True,
                                components={"cutset_term": a, "sdpi_term": b, "additive": n - 2},
                                flags=["large-n approximation; excluded from the combined value"],
                                inputs={"ell": ell.value, "H": H, "p": p})
        rep.add(closed)
        return rep
    if kind == "dumbbell":
        net = make_topology("dumbbell", size, {"kind": "bsc", "p": p})
        model = ObservationModel.iid(net.nodes, Marginal.rademacher())
        f = FunctionSpec.linear([1.0] * size)
        dist = Distortion("absolute")
        half = size // 2
        S = frozenset(str(v) for v in range(1, half + 1))
        rep.add(t_lower_cutset(net, model, f, dist, eps, delta, [S], name="dumbbell_bridge"))
        cap = 1 - binary_entropy(p)
        disp = ((1 - delta) / 2 * math.log2(math.pi * size / 4) - binary_entropy(delta)) / cap
        rep.add(BoundEntry("dumbbell_display", disp, asymptotic=True,
                           flags=["large-|V| approximation; excluded from the combined value"],
                           inputs={"V": size, "p": p, "delta": delta}))
        return rep
    if kind == "averaging":
        net = make_topology("ring" if size >= 3 else "two_node", size, {"kind": "bsc", "p": p})
        n_nodes = len(net)
        model = ObservationModel.iid(net.nodes, Marginal.gaussian(0.0, 1.0))
        f = FunctionSpec.linear([1.0 / n_nodes] * n_nodes)
        dist = Distortion("quadratic")
        conv = criteria_convert(lambda e: t_lower_rd(net, model, f, dist, e).value, "avg", eps, n_nodes=n_nodes)
        rep.criterion = "avg"
        rep.add(BoundEntry("averaging", conv["value"], inputs={"eps": eps, "evaluated_at": conv["argument"]},
                           flags=["T_avg(eps) >= T_max(|V| eps)"]))
        return rep
    raise ValueError(f"unknown corollary kind {kind!r}")


# -- criterion conversion ----------------------------------------------------

DEFAULT_DELTA_GRID = (0.5, 0.3, 0.2, 0.1, 0.05, 0.02, 0.01, 1e-3, 1e-4, 1e-6)


def criteria_convert(bound_fn: Callable, target: str, eps: float, d_max: float | None = None,
                     n_nodes: int | None = None, delta: float | None = None,
                     delta_grid: Sequence[float] = DEFAULT_DELTA_GRID) -> dict:
    """Transfer lower bounds between criteria.

    target="max": bound_fn(eps, delta) bounds T(eps, delta); returns
    max over the delta grid of bound_fn(eps / delta, delta) as a bound on T_max(eps).
    target="avg": bound_fn(eps) bounds T_max; returns bound_fn(|V| eps).
    target="excess": bound_fn(eps) bounds T_max; returns bound_fn(eps + delta d_max)
    as a bound on T(eps, delta).
    """
    if target == "max":
        best, arg = -math.inf, None
        for d in delta_grid:
            val = bound_fn(eps / d, d)
            if val > best:
                best, arg = val, d
        return {"value": max(best, 0.0), "target": "max", "delta": arg, "argument": eps / arg}
    if target == "avg":
        if not n_nodes:
            raise ValueError("avg conversion needs n_nodes")
        return {"value": max(bound_fn(n_nodes * eps), 0.0), "target": "avg", "argument": n_nodes * eps}
    if target == "excess":
        if d_max is None or delta is None:
            raise ValueError("excess conversion needs d_max and delta")
        arg = eps + delta * d_max
        return {"value": max(bound_fn(arg), 0.0), "target": "excess", "argument": arg}
    raise ValueError(f"unknown target {target!r}")


# -- Gaussian sums and baselines ---------------------------------------------

def _coef_norms(a: Sequence[float], nodes: Sequence[str], S: frozenset) -> float:
    return float(sum(x * x for x, v in zip(a, nodes) if v not in S))


def t_lower_gaussian(net: Network, a: Sequence[float], eps: float, delta: float,
                     strategy=None) -> BoundEntry:
    """max_S (1/C_S) ((1-delta)/2 log(pi ||a_{S^c}||^2 / (2 eps^2)) - h2(delta)) for i.i.d. N(0,1)."""
    name = "gaussian_sum"
    cond = math.sqrt(math.pi / 2) * (1 - delta) * min(abs(x) for x in a)
    flags = [] if eps <= cond else ["accuracy condition on eps not met"]
    best, best_S = -math.inf, None
    for S in _as_strategy(strategy).candidates(net):
        num = (1 - delta) / 2 * math.log2(math.pi * _coef_norms(a, net.nodes, S) / (2 * eps * eps)) \
            - binary_entropy(delta)
        cs = cutset_capacity(net, S)
        val = 0.0 if num <= 0 else (math.inf if cs == 0 else num / cs)
        if val > best:
            best, best_S = val, S
    return BoundEntry(name, max(best, 0.0), applicable=not flags, binding={"S": _sorted_ids(best_S)},
                      flags=flags, inputs={"eps": eps, "delta": delta})


def continuum_fano_gaussian(net: Network, a: Sequence[float], eps: float, delta: float,
                         strategy=None) -> BoundEntry:
    """Continuum-Fano baseline for Gaussian sums."""
    norm2 = float(sum(x * x for x in a))
    best, best_S = -math.inf, None
    for S in _as_strategy(strategy).candidates(net):
        num = (1 - delta) / 2 * math.log2(1 / (eps * eps)) \
            + 0.5 * math.log2(_coef_norms(a, net.nodes, S) / (8 * norm2))
        cs = cutset_capacity(net, S)
        val = 0.0 if num <= 0 else (math.inf if cs == 0 else num / cs)
        if val > best:
            best, best_S = val, S
    return BoundEntry("continuum_fano_baseline", max(best, 0.0), binding={"S": _sorted_ids(best_S)},
                      inputs={"eps": eps, "delta": delta})


def gaussian_dominance_condition(net: Network, a: Sequence[float], delta: float, strategy=None) -> bool:
    """True when the Gaussian-sum bound dominates the continuum-Fano baseline for every eps."""
    norm2 = float(sum(x * x for x in a))
    for S in _as_strategy(strategy).candidates(net):
        s2 = _coef_norms(a, net.nodes, S)
        lhs = (1 - delta) / 2 * math.log2(math.pi * s2 / 2) - binary_entropy(delta)
        rhs = 0.5 * math.log2(s2 / (8 * norm2))
        if lhs < rhs:
            return False
    return True


def ayaso_baseline(net: Network, eps: float, delta: float, B: float, kappa: float,
                   a: Sequence[float] | None = None, strategy=None) -> dict:
    """Relative-accuracy baseline for Uniform[1, 1+B] observations and its counterpart.

    Returns the baseline value, its eps, delta -> 0 limit, and the
    log-concave counterpart that grows like log(1/eps).
    """
    if B <= 0 or kappa <= 0:
        raise ValueError("B and kappa must be positive")
    nodes = net.nodes
    nv = len(nodes)
    a = [1.0] * nv if a is None else [float(x) for x in a]
    l1 = sum(abs(x) for x in a)
    base, lim, ours = -math.inf, -math.inf, -math.inf
    arg = {}
    for S in _as_strategy(strategy).candidates(net):
        cs = cutset_capacity(net, S)
        if cs == 0:
            base = lim = ours = math.inf
            arg = {"S": _sorted_ids(S)}
            break
        inner = B * eps * eps + kappa * delta + (1 / B) ** (2 / nv)
        v26 = len(S) / (2 * cs) * math.log2(1 / inner)
        v_lim = len(S) / cs * math.log2(B) / nv
        s2 = _coef_norms(a, nodes, S)
        v29 = ((1 - delta) / 2 * math.log2(B * B * s2 / (48 * (B + 1) ** 2 * l1 * l1 * eps * eps))
               - binary_entropy(delta)) / cs
        if v26 > base:
            base, arg["baseline_S"] = v26, _sorted_ids(S)
        if v29 > ours:
            ours, arg["ours_S"] = v29, _sorted_ids(S)
        lim = max(lim, v_lim)
    return {"baseline": base, "baseline_limit": lim, "log_concave": ours, "binding": arg,
            "inputs": {"eps": eps, "delta": delta, "B": B, "kappa": kappa}}
