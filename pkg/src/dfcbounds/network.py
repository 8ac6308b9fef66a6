"""Directed channel networks, cutsets, successive partitions and chain reduction."""
from __future__ import annotations

import itertools
from collections import deque
from dataclasses import dataclass, field
from typing import Iterable, Mapping, Sequence

from .channels import Channel, bsc, capacity, make_channel, sdpi_constant, sdpi_product_upper


class NetworkError(ValueError):
    pass


class PartitionError(NetworkError):
    pass


@dataclass(frozen=True)
class Edge:
    src: str
    dst: str
    channel: Channel

    @property
    def key(self) -> tuple[str, str]:
        return (self.src, self.dst)


def _as_ids(nodes: Iterable) -> frozenset[str]:
    return frozenset(str(v) for v in nodes)


@dataclass(frozen=True, eq=False)
class Network:
    """Directed graph with one channel per edge. Node ids are strings."""

    nodes: tuple[str, ...]
    edges: tuple[Edge, ...]
    _in: dict = field(init=False, repr=False)
    _out: dict = field(init=False, repr=False)

    def __post_init__(self):
        nodes = tuple(str(v) for v in self.nodes)
        if not nodes:
            raise NetworkError("network needs at least one node")
        if len(set(nodes)) != len(nodes):
            raise NetworkError("duplicate node ids")
        known = set(nodes)
        seen = set()
        edges = []
        for e in self.edges:
            e = Edge(str(e.src), str(e.dst), make_channel(e.channel))
            for end in (e.src, e.dst):
                if end not in known:
                    raise NetworkError(f"edge {e.src}->{e.dst} references undeclared node {end!r}")
            if e.src == e.dst:
                raise NetworkError(f"self-loop at node {e.src!r} is not allowed")
            if e.key in seen:
                raise NetworkError(f"duplicate edge {e.src}->{e.dst}")
            seen.add(e.key)
            edges.append(e)
        ins = {v: [] for v in nodes}
        outs = {v: [] for v in nodes}
        for e in edges:
            ins[e.dst].append(e)
            outs[e.src].append(e)
        object.__setattr__(self, "nodes", nodes)
        object.__setattr__(self, "edges", tuple(edges))
        object.__setattr__(self, "_in", {v: tuple(es) for v, es in ins.items()})
        object.__setattr__(self, "_out", {v: tuple(es) for v, es in outs.items()})

    @classmethod
    def from_edges(cls, nodes: Sequence, edges: Iterable[tuple]) -> "Network":
        """Build from ``(u, v, channel_or_spec)`` triples."""
        return cls(tuple(nodes), tuple(Edge(str(u), str(v), make_channel(ch)) for u, v, ch in edges))

    def in_edges(self, v) -> tuple[Edge, ...]:
        return self._in[self._check(v)]

    def out_edges(self, v) -> tuple[Edge, ...]:
        return self._out[self._check(v)]

    def _check(self, v) -> str:
        v = str(v)
        if v not in self._in:
            raise NetworkError(f"unknown node {v!r}")
        return v

    def edge(self, u, v) -> Edge | None:
        u, v = str(u), str(v)
        for e in self._out[self._check(u)]:
            if e.dst == v:
                return e
        return None

    def undirected_neighbors(self, v) -> set[str]:
        v = self._check(v)
        return {e.src for e in self._in[v]} | {e.dst for e in self._out[v]}

    def is_bidirectional(self) -> bool:
        keys = {e.key for e in self.edges}
        return all((v, u) in keys for u, v in keys)

    def is_connected(self) -> bool:
        return len(_bfs_distances(self, self.nodes[0])) == len(self.nodes)

    def to_spec(self) -> dict:
        return {
            "nodes": list(self.nodes),
            "edges": [{"from": e.src, "to": e.dst, "channel": e.channel.to_spec()} for e in self.edges],
        }

    def __len__(self):
        return len(self.nodes)


def _proper_subset(net: Network, S) -> frozenset[str]:
    S = _as_ids(S)
    unknown = S - set(net.nodes)
    if unknown:
        raise NetworkError(f"unknown nodes {sorted(unknown)}")
    if not S or len(S) == len(net.nodes):
        raise NetworkError("S must be a nonempty proper subset of V")
    return S


def cutset(net: Network, S) -> tuple[Edge, ...]:
    """Edges from S^c into S, in edge declaration order."""
    S = _proper_subset(net, S)
    return tuple(e for e in net.edges if e.dst in S and e.src not in S)


def _cut_keys(net: Network, S: frozenset[str]) -> set[tuple[str, str]]:
    return {e.key for e in net.edges if e.dst in S and e.src not in S}


def cutset_capacity(net: Network, S) -> float:
    return float(sum(capacity(e.channel) for e in cutset(net, S)))


@dataclass(frozen=True)
class NodeSdpi:
    eta_upper: float
    eta_star: float
    in_degree: int
    exact: bool

    def __iter__(self):
        return iter((self.eta_upper, self.eta_star, self.in_degree))


def node_sdpi(net: Network, v) -> NodeSdpi:
    """(product bound on eta_v, max in-edge eta, in-degree)."""
    edges = net.in_edges(v)
    if not edges:
        return NodeSdpi(0.0, 0.0, 0, True)
    etas = [sdpi_constant(e.channel) for e in edges]
    star = max(eta for eta, _ in etas)
    exact = all(flag == "exact" for _, flag in etas)
    return NodeSdpi(sdpi_product_upper(star, len(edges)), star, len(edges), exact)


def _bfs_distances(net: Network, root: str) -> dict[str, int]:
    dist = {root: 0}
    queue = deque([root])
    while queue:
        u = queue.popleft()
        for w in sorted(net.undirected_neighbors(u)):
            if w not in dist:
                dist[w] = dist[u] + 1
                queue.append(w)
    return dist


def eccentricities(net: Network) -> dict[str, int]:
    ecc = {}
    for v in net.nodes:
        dist = _bfs_distances(net, v)
        if len(dist) != len(net.nodes):
            raise NetworkError("network is disconnected (infinite diameter)")
        ecc[v] = max(dist.values())
    return ecc


def diameter(net: Network) -> int:
    """Largest hop distance over the underlying undirected graph."""
    return max(eccentricities(net).values())


@dataclass(frozen=True)
class SuccessivePartition:
    """Blocks S_1..S_n of a successive partition.

    ``degrees[i]`` is d_{i+2} (the list starts at block 2). ``exact_degrees``
    always holds the merged in-degree statistic counted edge by edge; a preset
    may report a uniform ``degrees`` sequence that dominates it entrywise.
    """

    subsets: tuple[frozenset, ...]
    left_bound: tuple[frozenset, ...]
    degrees: tuple[int, ...]
    exact_degrees: tuple[int, ...]
    degree_rule: str = "exact"

    @property
    def n(self) -> int:
        return len(self.subsets)

    @property
    def delta(self) -> int:
        return max(self.degrees) if self.degrees else 0

    @property
    def nested(self) -> tuple[frozenset, ...]:
        acc, out = frozenset(), []
        for s in self.subsets[:-1]:
            acc = acc | s
            out.append(acc)
        return tuple(out)

    def block_of(self, v) -> int:
        """0-based index of the block containing v."""
        v = str(v)
        for i, s in enumerate(self.subsets):
            if v in s:
                return i
        raise NetworkError(f"node {v!r} not in partition")

    def with_degrees(self, degrees: Sequence[int], rule: str) -> "SuccessivePartition":
        degrees = tuple(int(d) for d in degrees)
        if len(degrees) != len(self.exact_degrees):
            raise PartitionError("degree sequence length mismatch")
        for i, (d, e) in enumerate(zip(degrees, self.exact_degrees), start=2):
            if d < e:
                raise PartitionError(f"d_{i} = {d} is below the counted value {e}")
        return SuccessivePartition(self.subsets, self.left_bound, degrees, self.exact_degrees, rule)

    def to_dict(self) -> dict:
        return {
            "subsets": [sorted(s) for s in self.subsets],
            "left_bound": [sorted(s) for s in self.left_bound],
            "degrees": list(self.degrees),
            "exact_degrees": list(self.exact_degrees),
            "degree_rule": self.degree_rule,
            "delta": self.delta,
        }


def validate_partition(net: Network, nested: Sequence[Iterable]) -> SuccessivePartition:
    """Check P_1 ⊂ ... ⊂ P_{n-1} for a successive partition and derive its blocks."""
    nested = [_as_ids(p) for p in nested]
    if not nested:
        raise PartitionError("need at least one nested set")
    for p in nested:
        _proper_subset(net, p)
    for i in range(1, len(nested)):
        if not nested[i - 1] < nested[i]:
            raise PartitionError(f"P_{i} is not a strict subset of P_{i + 1}")
    fwd = [_cut_keys(net, p) for p in nested]
    comp_sets = [frozenset(net.nodes) - p for p in nested]
    bwd = [_cut_keys(net, c) for c in comp_sets]
    for family, label in ((fwd, "E_P"), (bwd, "E_P^c")):
        for i, j in itertools.combinations(range(len(nested)), 2):
            shared = family[i] & family[j]
            if shared:
                u, v = sorted(shared)[0]
                raise PartitionError(
                    f"cutsets {label}{i + 1} and {label}{j + 1} share edge ({u},{v})"
                )
    blocks, prev = [], frozenset()
    for p in nested + [frozenset(net.nodes)]:
        blocks.append(p - prev)
        prev = p
    where = {v: i for i, s in enumerate(blocks) for v in s}
    for e in net.edges:
        if abs(where[e.src] - where[e.dst]) > 1:
            raise PartitionError(
                f"edge ({e.src},{e.dst}) joins non-adjacent blocks {where[e.src] + 1} and {where[e.dst] + 1}"
            )
    left = [frozenset({min(blocks[0])})]
    for i in range(1, len(blocks)):
        lb = frozenset(e.src for e in net.edges if where[e.src] == i and where[e.dst] == i - 1)
        left.append(lb)
    degrees = []
    for i in range(1, len(blocks)):
        from_prev = len(bwd[i - 1])  # edges S_{i-1} -> S_i
        from_next = len(fwd[i]) if i < len(nested) else 0  # edges S_{i+1} -> S_i
        internal = sum(1 for e in net.edges if where[e.src] == i and e.dst in left[i])
        degrees.append(from_prev + from_next + internal)
    degrees = tuple(degrees)
    return SuccessivePartition(tuple(blocks), tuple(left), degrees, degrees)


def partition_from_blocks(net: Network, blocks: Sequence[Iterable]) -> SuccessivePartition:
    blocks = [_as_ids(b) for b in blocks]
    covered = set().union(*blocks) if blocks else set()
    if covered != set(net.nodes) or sum(len(b) for b in blocks) != len(net.nodes):
        raise PartitionError("blocks must be disjoint and cover every node")
    if len(blocks) < 2:
        raise PartitionError("a successive partition needs at least two blocks")
    nested, acc = [], frozenset()
    for b in blocks[:-1]:
        acc = acc | b
        nested.append(acc)
    return validate_partition(net, nested)


def bfs_partition(net: Network, v0=None) -> SuccessivePartition:
    """Blocks are the BFS spheres around v0.

    Without v0 the lexicographically smallest node of maximal eccentricity is
    used, so that n - 1 equals the diameter.
    """
    if not net.is_bidirectional():
        bad = next(e for e in net.edges if net.edge(e.dst, e.src) is None)
        raise NetworkError(f"edge ({bad.src},{bad.dst}) has no reverse link")
    if v0 is None:
        ecc = eccentricities(net)
        top = max(ecc.values())
        v0 = min(v for v, r in ecc.items() if r == top)
    v0 = net._check(v0)
    dist = _bfs_distances(net, v0)
    if len(dist) != len(net.nodes):
        raise NetworkError("network is disconnected")
    radius = max(dist.values())
    if radius == 0:
        raise PartitionError("single-node network has no successive partition")
    blocks = [frozenset(v for v, r in dist.items() if r == k) for k in range(radius + 1)]
    return partition_from_blocks(net, blocks)


@dataclass(frozen=True)
class ChainModel:
    """Bidirected chain obtained by merging each block into one node.

    ``etas`` lists the SDPI upper bounds of nodes 2'..n'.
    """

    n: int
    etas: tuple[float, ...]
    degrees: tuple[int, ...]
    capacity: float
    eta_exact: bool


def reduce_to_chain(net: Network, partition: SuccessivePartition,
                    uniform_eta: float | None = None) -> ChainModel:
    for i, lb in enumerate(partition.left_bound, start=1):
        if not lb:
            raise PartitionError(f"block S_{i} has no left-bound node")
    if uniform_eta is not None:
        if not 0.0 <= uniform_eta <= 1.0:
            raise ValueError("uniform_eta must lie in [0, 1]")
        etas = tuple(sdpi_product_upper(uniform_eta, d) if d else 0.0 for d in partition.degrees)
        exact = True
    else:
        where = {v: i for i, s in enumerate(partition.subsets) for v in s}
        etas, exact = [], True
        for i in range(1, partition.n):
            merged = [
                e for e in net.edges
                if where[e.dst] == i and (where[e.src] != i or e.dst in partition.left_bound[i])
            ]
            if not merged:
                etas.append(0.0)
                continue
            vals = [sdpi_constant(e.channel) for e in merged]
            exact &= all(f == "exact" for _, f in vals)
            star = max(eta for eta, _ in vals)
            # counts may be raised by a preset degree rule; using it keeps the bound sound
            etas.append(sdpi_product_upper(star, max(len(merged), partition.degrees[i - 1])))
        etas = tuple(etas)
    comp = frozenset(net.nodes) - partition.subsets[0]
    return ChainModel(partition.n, etas, partition.degrees, cutset_capacity(net, comp), exact)


# -- topologies --------------------------------------------------------------

def _bidirected(nodes: Sequence, pairs: Iterable[tuple], channel) -> Network:
    ch = make_channel(channel)
    edges = []
    for u, v in pairs:
        edges.append(Edge(str(u), str(v), ch))
        edges.append(Edge(str(v), str(u), ch))
    return Network(tuple(str(v) for v in nodes), tuple(edges))


def make_topology(kind: str, size: int = 2, channel: Mapping | Channel | None = None,
                  degree: int | None = None) -> Network:
    """Bidirectional preset networks with one channel type on every link.

    ``size`` is the node count for chain/ring/dumbbell, the side length for
    grid and the longest-path length for tree. Trees are caterpillars: path
    1..size with ``degree - 2`` leaves on every interior path node.
    """
    ch = make_channel(channel) if channel is not None else bsc(0.0)
    if kind == "two_node":
        return _bidirected([1, 2], [(1, 2)], ch)
    if kind == "chain":
        if size < 2:
            raise NetworkError("chain needs at least 2 nodes")
        return _bidirected(range(1, size + 1), [(i, i + 1) for i in range(1, size)], ch)
    if kind == "ring":
        if size < 3:
            raise NetworkError("ring needs at least 3 nodes")
        pairs = [(i, i % size + 1) for i in range(1, size + 1)]
        return _bidirected(range(1, size + 1), pairs, ch)
    if kind == "grid":
        if size < 2:
            raise NetworkError("grid side must be at least 2")
        label = lambda r, c: r * size + c + 1  # noqa: E731
        pairs = []
        for r in range(size):
            for c in range(size):
                if c + 1 < size:
                    pairs.append((label(r, c), label(r, c + 1)))
                if r + 1 < size:
                    pairs.append((label(r, c), label(r + 1, c)))
        return _bidirected(range(1, size * size + 1), pairs, ch)
    if kind == "tree":
        d = 3 if degree is None else degree
        if size < 2 or d < 2:
            raise NetworkError("tree needs path length >= 2 and degree >= 2")
        pairs = [(i, i + 1) for i in range(1, size)]
        nxt = size + 1
        for i in range(2, size):
            for _ in range(d - 2):
                pairs.append((i, nxt))
                nxt += 1
        return _bidirected(range(1, nxt), pairs, ch)
    if kind == "dumbbell":
        if size < 4 or size % 2:
            raise NetworkError("dumbbell needs an even node count >= 4")
        half = size // 2
        pairs = list(itertools.combinations(range(1, half + 1), 2))
        pairs += list(itertools.combinations(range(half + 1, size + 1), 2))
        pairs.append((half, half + 1))
        return _bidirected(range(1, size + 1), pairs, ch)
    raise NetworkError(f"unknown topology {kind!r}")


def preset_partition(kind: str, net: Network, degree: int | None = None) -> SuccessivePartition:
    """Partition used by the per-topology corollaries.

    Chains, rings and trees report the uniform block statistic (2, 4 and d);
    it dominates the edge count at the last block, so the resulting bounds
    stay valid. Grids use the BFS spheres from node 1, whose counts already
    match the closed form.
    """
    if kind in ("two_node", "chain"):
        part = partition_from_blocks(net, [[v] for v in sorted(net.nodes, key=int)])
        return part.with_degrees([2] * (part.n - 1), "uniform")
    if kind == "ring":
        if len(net) % 2:
            raise NetworkError("ring preset partition needs an even node count (2n - 2 nodes)")
        part = bfs_partition(net, "1")
        return part.with_degrees([4] * (part.n - 1), "uniform")
    if kind == "grid":
        return bfs_partition(net, "1")
    if kind == "tree":
        path = _tree_path(net)
        d = degree if degree is not None else max(len(net.in_edges(v)) for v in net.nodes)
        root = path[0]
        # S_i = D_i minus D_{i+1} when rooted at the path start
        dist = _bfs_distances(net, root)
        blocks = []
        for i, v in enumerate(path):
            nxt = path[i + 1] if i + 1 < len(path) else None
            block = _subtree(net, v, dist) - (_subtree(net, nxt, dist) if nxt else frozenset())
            blocks.append(block)
        part = partition_from_blocks(net, blocks)
        return part.with_degrees([d] * (part.n - 1), "uniform")
    raise NetworkError(f"no preset partition for {kind!r}")


def _subtree(net: Network, v: str, dist: Mapping[str, int]) -> frozenset[str]:
    out, stack = {v}, [v]
    while stack:
        u = stack.pop()
        for w in net.undirected_neighbors(u):
            if dist[w] == dist[u] + 1 and w not in out:
                out.add(w)
                stack.append(w)
    return frozenset(out)


def _tree_path(net: Network) -> list[str]:
    """A longest path, starting from node '1' when it is an endpoint of one."""
    ecc = eccentricities(net)
    top = max(ecc.values())
    start = "1" if ecc.get("1") == top else min(v for v, r in ecc.items() if r == top)
    dist = _bfs_distances(net, start)
    far = max(dist.values())
    end = min((v for v, r in dist.items() if r == far), key=lambda v: (len(v), v))
    path = [end]
    while path[-1] != start:
        u = path[-1]
        path.append(min((w for w in net.undirected_neighbors(u) if dist[w] == dist[u] - 1),
                        key=lambda v: (len(v), v)))
    return path[::-1]
