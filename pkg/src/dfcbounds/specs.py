"""Problem files: parsing, validation and the normalized serialized form.

A problem file (YAML or JSON) has the sections ``network``,
``observations``, ``function``, ``distortion`` and an optional ``query``.
See the README for the grammar.
"""
from __future__ import annotations

import copy
import json
from dataclasses import dataclass, field
from pathlib import Path
from typing import Any, Mapping

import yaml

from .channels import ChannelError, make_channel
from .models import Distortion, FunctionSpec, Marginal, ModelError, ObservationModel
from .network import Edge, Network, NetworkError, make_topology

TOP_KEYS = {"network", "observations", "function", "distortion", "query"}
NETWORK_KEYS = {"topology", "nodes", "edges", "channel"}
TOPOLOGY_KEYS = {"kind", "size", "degree", "channel"}
EDGE_KEYS = {"from", "to", "between", "channel"}
OBS_KEYS = {"iid", "per_node"}
QUERY_KEYS = {"eps", "delta", "criterion", "strategy", "sets", "partition", "root", "seed", "samples"}
CRITERIA = ("excess", "max", "avg")

QUERY_DEFAULTS = {
    "eps": 0.0,
    "delta": 0.1,
    "criterion": "excess",
    "strategy": "default",
    "sets": [],
    "partition": "auto",
    "root": None,
    "seed": 0,
    "samples": 200_000,
}


class SpecError(ValueError):
    pass


@dataclass
class ProblemSpec:
    net: Network
    model: ObservationModel
    f: FunctionSpec
    dist: Distortion
    query: dict = field(default_factory=lambda: dict(QUERY_DEFAULTS))
    topology: dict | None = None

    def to_dict(self) -> dict:
        """Normalized form: the topology preset or explicit directed edges, all defaults filled."""
        net = {"topology": dict(self.topology)} if self.topology is not None else self.net.to_spec()
        out = {
            "network": net,
            "observations": self.model.to_spec(),
            "function": self.f.to_spec(),
            "distortion": self.dist.to_spec(),
            "query": copy.deepcopy(self.query),
        }
        return out


def _unknown(section: str, data: Mapping, allowed: set, strict: bool) -> None:
    extra = set(data) - allowed
    if strict and extra:
        raise SpecError(f"unknown keys in {section}: {sorted(extra)}")


def _network(data: Mapping, strict: bool) -> tuple[Network, dict | None]:
    if not isinstance(data, Mapping):
        raise SpecError("network section must be a mapping")
    _unknown("network", data, NETWORK_KEYS, strict)
    topo = data.get("topology")
    if topo is not None:
        _unknown("network.topology", topo, TOPOLOGY_KEYS, strict)
        if "kind" not in topo:
            raise SpecError("network.topology needs a kind")
        channel = topo.get("channel", data.get("channel", {"kind": "bsc", "p": 0.0}))
        norm = {"kind": topo["kind"], "size": int(topo.get("size", 2)), "channel": dict(channel)}
        if topo.get("degree") is not None:
            norm["degree"] = int(topo["degree"])
        net = make_topology(norm["kind"], norm["size"], channel, degree=norm.get("degree"))
        if "nodes" in data or "edges" in data:
            raise SpecError("give either network.topology or explicit nodes/edges, not both")
        return net, norm
    if "nodes" not in data:
        raise SpecError("network needs nodes (or a topology preset)")
    nodes = [str(v) for v in data["nodes"]]
    default_ch = data.get("channel")
    edges = []
    for i, e in enumerate(data.get("edges", [])):
        _unknown(f"network.edges[{i}]", e, EDGE_KEYS, strict)
        ch_spec = e.get("channel", default_ch)
        if ch_spec is None:
            raise SpecError(f"edge {i} has no channel and no default channel is set")
        ch = make_channel(ch_spec)
        if "between" in e:
            if "from" in e or "to" in e:
                raise SpecError(f"edge {i}: use either between or from/to")
            pair = e["between"]
            if len(pair) != 2:
                raise SpecError(f"edge {i}: between needs two node ids")
            u, v = str(pair[0]), str(pair[1])
            edges += [Edge(u, v, ch), Edge(v, u, ch)]
        else:
            if "from" not in e or "to" not in e:
                raise SpecError(f"edge {i}: needs from/to or between")
            edges.append(Edge(str(e["from"]), str(e["to"]), ch))
    return Network(tuple(nodes), tuple(edges)), None


def _observations(data: Mapping, nodes: tuple[str, ...], strict: bool) -> ObservationModel:
    if not isinstance(data, Mapping):
        raise SpecError("observations section must be a mapping")
    _unknown("observations", data, OBS_KEYS, strict)
    if "iid" in data:
        return ObservationModel.iid(nodes, Marginal.from_spec(data["iid"]))
    if "per_node" in data:
        per = {str(k): v for k, v in data["per_node"].items()}
        missing = [v for v in nodes if v not in per]
        extra = sorted(set(per) - set(nodes))
        if missing:
            raise SpecError(f"observations missing for nodes {missing}")
        if extra:
            raise SpecError(f"observations given for undeclared nodes {extra}")
        return ObservationModel(nodes, tuple(Marginal.from_spec(per[v]) for v in nodes))
    raise SpecError("observations need iid or per_node")


def _compatible(f: FunctionSpec, dist: Distortion) -> None:
    vector = f.kind in ("identity", "linear_vector")
    if vector and dist.kind in ("absolute", "quadratic"):
        raise SpecError(f"{dist.kind} distortion needs a scalar target, got {f.kind}")
    if not vector and dist.kind == "euclidean":
        raise SpecError("euclidean distortion needs a vector target")


def _query(data: Mapping | None, strict: bool) -> dict:
    q = dict(QUERY_DEFAULTS)
    if data is None:
        return q
    _unknown("query", data, QUERY_KEYS, strict)
    q.update(data)
    q["eps"], q["delta"] = float(q["eps"]), float(q["delta"])
    if q["eps"] < 0:
        raise SpecError("query.eps must be nonnegative")
    if not 0 <= q["delta"] < 1:
        raise SpecError("query.delta must lie in [0, 1)")
    if q["criterion"] not in CRITERIA:
        raise SpecError(f"query.criterion must be one of {CRITERIA}")
    q["sets"] = [[str(v) for v in s] for s in q["sets"]]
    part = q["partition"]
    if not isinstance(part, str):
        q["partition"] = [[str(v) for v in block] for block in part]
    elif part not in ("auto", "bfs", "preset", "none"):
        raise SpecError("query.partition must be auto, bfs, preset, none or a list of blocks")
    q["root"] = None if q["root"] is None else str(q["root"])
    q["seed"], q["samples"] = int(q["seed"]), int(q["samples"])
    return q


def parse_spec_dict(data: Mapping, strict: bool = True) -> ProblemSpec:
    if not isinstance(data, Mapping):
        raise SpecError("problem file must contain a mapping")
    _unknown("problem", data, TOP_KEYS, strict)
    for key in ("network", "observations", "function", "distortion"):
        if key not in data:
            raise SpecError(f"missing section {key!r}")
    try:
        net, topo = _network(data["network"], strict)
        model = _observations(data["observations"], net.nodes, strict)
        f = FunctionSpec.from_spec(data["function"], n_nodes=len(net))
        dist = Distortion.from_spec(data["distortion"])
        f.check(model)
    except (NetworkError, ModelError, ChannelError, KeyError, TypeError) as exc:
        raise SpecError(str(exc)) from exc
    _compatible(f, dist)
    query = _query(data.get("query"), strict)
    for s in query["sets"]:
        unknown = set(s) - set(net.nodes)
        if unknown:
            raise SpecError(f"query.sets references undeclared nodes {sorted(unknown)}")
    if query["root"] is not None and query["root"] not in net.nodes:
        raise SpecError(f"query.root {query['root']!r} is not a node")
    return ProblemSpec(net, model, f, dist, query, topo)


def load_file(path: str | Path) -> Any:
    text = Path(path).read_text()
    if str(path).endswith(".json"):
        return json.loads(text)
    return yaml.safe_load(text)


def parse_spec(path: str | Path, strict: bool = True) -> ProblemSpec:
    return parse_spec_dict(load_file(path), strict)
