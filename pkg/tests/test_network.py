from __future__ import annotations

import networkx as nx
import pytest
from hypothesis import given
from hypothesis import strategies as st

from dfcbounds.channels import bec, bsc, capacity
from dfcbounds.network import (
    Network,
    NetworkError,
    PartitionError,
    bfs_partition,
    cutset,
    cutset_capacity,
    diameter,
    eccentricities,
    make_topology,
    node_sdpi,
    partition_from_blocks,
    preset_partition,
    reduce_to_chain,
    validate_partition,
)

CH = {"kind": "bsc", "p": 0.3}


def test_undeclared_node_error_names_it():
    with pytest.raises(NetworkError, match="'9'"):
        Network.from_edges([1, 2], [(1, 9, CH)])


def test_self_loops_and_duplicates_rejected():
    with pytest.raises(NetworkError):
        Network.from_edges([1, 2], [(1, 1, CH)])
    with pytest.raises(NetworkError):
        Network.from_edges([1, 2], [(1, 2, CH), (1, 2, CH)])


def test_cutset_and_capacity_on_ring():
    net = make_topology("ring", 6, CH)
    S = {"2", "3", "4", "5", "6"}
    assert {e.key for e in cutset(net, S)} == {("1", "2"), ("1", "6")}
    assert cutset_capacity(net, S) == pytest.approx(2 * capacity(bsc(0.3)))


def test_node_sdpi_ring():
    net = make_topology("ring", 6, CH)
    upper, star, deg = node_sdpi(net, "1")
    assert (round(upper, 12), round(star, 12), deg) == (0.2944, 0.16, 2)


def test_ring_bfs_partition():
    net = make_topology("ring", 6, CH)
    part = bfs_partition(net, "1")
    assert [sorted(s) for s in part.subsets] == [["1"], ["2", "6"], ["3", "5"], ["4"]]
    assert part.exact_degrees == (4, 4, 2)
    assert preset_partition("ring", net).degrees == (4, 4, 4)


def test_grid_preset():
    net = make_topology("grid", 3, CH)
    assert preset_partition("grid", net).degrees == (6, 8, 6, 2)


def test_chain_and_tree_presets():
    chain = make_topology("chain", 5, CH)
    part = preset_partition("chain", chain)
    assert part.degrees == (2, 2, 2, 2)
    assert part.exact_degrees == (2, 2, 2, 1)
    tree = make_topology("tree", 6, CH, degree=4)
    assert set(preset_partition("tree", tree, degree=4).degrees) == {4}


def test_uniform_degrees_cannot_undercut_counts():
    part = bfs_partition(make_topology("ring", 6, CH), "1")
    with pytest.raises(PartitionError):
        part.with_degrees((3, 4, 2), "uniform")


def test_validate_partition_rejects_shared_cutset_edges():
    # triangle: P1 = {1}, P2 = {1, 2}; edge 1->3 lies in both forward cutsets
    net = Network.from_edges([1, 2, 3], [(u, v, CH) for u in (1, 2, 3) for v in (1, 2, 3) if u != v])
    with pytest.raises(PartitionError):
        validate_partition(net, [{"1"}, {"1", "2"}])


def test_partition_blocks_must_cover():
    net = make_topology("chain", 3, CH)
    with pytest.raises(PartitionError):
        partition_from_blocks(net, [["1"], ["2"]])


def test_reduce_to_chain_two_node():
    net = make_topology("two_node", 2, CH)
    chain = reduce_to_chain(net, bfs_partition(net))
    assert chain.n == 2
    assert chain.etas[0] == pytest.approx(0.16)
    assert chain.capacity == pytest.approx(capacity(bsc(0.3)))


def test_unidirectional_link_blocks_bfs():
    net = Network.from_edges([1, 2, 3], [(1, 2, CH), (2, 1, CH), (2, 3, CH)])
    with pytest.raises(NetworkError):
        bfs_partition(net)


def test_mixed_channels_node_sdpi():
    net = Network.from_edges([1, 2, 3], [(1, 3, bsc(0.1)), (2, 3, bec(0.5)), (3, 1, bsc(0.1))])
    res = node_sdpi(net, "3")
    assert res.eta_star == pytest.approx(0.64)
    assert res.in_degree == 2


@st.composite
def connected_graphs(draw):
    n = draw(st.integers(2, 9))
    edges = [(i, draw(st.integers(0, i - 1))) for i in range(1, n)]  # spanning tree
    extra = draw(st.lists(st.tuples(st.integers(0, n - 1), st.integers(0, n - 1)), max_size=10))
    edges += [(u, v) for u, v in extra if u != v]
    return n, {tuple(sorted(e)) for e in edges}


def _net(n, pairs):
    edges = []
    for u, v in pairs:
        edges += [(u, v, CH), (v, u, CH)]
    return Network.from_edges(range(n), edges)


@given(connected_graphs())
def test_eccentricity_matches_networkx(g):
    n, pairs = g
    net = _net(n, pairs)
    ref = nx.Graph(list(pairs))
    ref.add_nodes_from(range(n))
    assert eccentricities(net) == {str(k): v for k, v in nx.eccentricity(ref).items()}
    assert diameter(net) == nx.diameter(ref)


@given(connected_graphs())
def test_bfs_partition_is_valid_with_diameter_blocks(g):
    n, pairs = g
    net = _net(n, pairs)
    part = bfs_partition(net)
    assert part.n == diameter(net) + 1
    assert all(d >= 1 for d in part.exact_degrees)
    assert part.degrees == part.exact_degrees
    # each block's nodes sit at a single BFS distance from the root
    root = next(iter(part.subsets[0]))
    dist = nx.single_source_shortest_path_length(nx.Graph(list(pairs)), int(root))
    for i, block in enumerate(part.subsets):
        assert {dist[int(v)] for v in block} == {i}
