from __future__ import annotations

import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from dfcbounds.channels import bsc, capacity
from dfcbounds.comp_time import (
    BoundReport,
    CutsetStrategy,
    ayaso_baseline,
    ceil_time,
    continuum_fano_gaussian,
    corollary_preset,
    criteria_convert,
    gaussian_dominance_condition,
    t_lower_combined,
    t_lower_cutset,
    t_lower_gaussian,
    t_lower_multicut,
    t_lower_rd,
    t_lower_sdpi_single,
)
from dfcbounds.infotheory import binary_entropy
from dfcbounds.mi_bounds import chain_closed_C, chain_closed_H, mi_lower_smallball
from dfcbounds.models import Distortion, FunctionSpec, Marginal, ObservationModel
from dfcbounds.network import Network, bfs_partition, make_topology, partition_from_blocks

PARITY = FunctionSpec.parity()
HAM = Distortion("hamming")


def two_node(p=0.3):
    net = make_topology("two_node", 2, {"kind": "bsc", "p": p})
    return net, ObservationModel.iid(net.nodes, Marginal.bernoulli(0.5))


def test_two_node_values():
    net, model = two_node()
    cap = 1 - binary_entropy(0.3)
    e1 = t_lower_cutset(net, model, PARITY, HAM, 0.0, 0.1)
    assert e1.value == pytest.approx((0.9 - binary_entropy(0.1)) / cap)
    assert e1.value == pytest.approx(3.6308, abs=1e-3)
    assert e1.integer == 4
    e3 = t_lower_sdpi_single(net, model, PARITY, HAM, 0.0, 0.01)
    assert e3.value == pytest.approx(13.761, abs=1e-3)
    assert e3.integer == 14
    assert t_lower_cutset(net, model, PARITY, HAM, 0.0, 0.01).value == pytest.approx(7.659, abs=1e-3)


def test_ceil_time():
    assert ceil_time(3.0) == 3
    assert ceil_time(3.0000000001) == 3
    assert ceil_time(3.01) == 4
    assert ceil_time(-1.0) == 0
    assert ceil_time(math.inf) == math.inf


@pytest.mark.parametrize("delta", [0.2, 0.1, 0.01, 1e-4])
def test_inversion_is_tight(delta):
    net, model = two_node()
    ell = mi_lower_smallball(0.5, delta).value
    cap = capacity(bsc(0.3))
    e1 = t_lower_cutset(net, model, PARITY, HAM, 0.0, delta)
    assert (e1.integer - 1) * cap < ell <= e1.integer * cap + 1e-12
    e3 = t_lower_sdpi_single(net, model, PARITY, HAM, 0.0, delta)
    below = 1 - 0.84 ** (e3.integer - 1)
    assert below < ell
    assert 1 - 0.84 ** e3.integer >= ell - 1e-12


def test_multicut_exact_component_is_tight():
    net = make_topology("ring", 6, {"kind": "bsc", "p": 0.3})
    model = ObservationModel.iid(net.nodes, Marginal.bernoulli(0.5))
    part = bfs_partition(net, "1")
    e = t_lower_multicut(net, part, model, PARITY, HAM, 0.0, 0.01)
    T = e.components["chain_exact"]
    eta_t, H, C, ell, n = (e.inputs[k] for k in ("eta_tilde", "H", "C", "ell", "n"))
    assert min(chain_closed_H(n, T, eta_t, H), chain_closed_C(n, T, eta_t, C)) >= ell
    assert min(chain_closed_H(n, T - 1, eta_t, H), chain_closed_C(n, T - 1, eta_t, C)) < ell
    assert e.inputs["n"] == 4 and e.inputs["Delta"] == 4


def test_delta_to_zero_divergence():
    net, model = two_node()
    assert t_lower_sdpi_single(net, model, PARITY, HAM, 0.0, 1e-15).value > 50


def test_disconnected_is_infinite():
    net = Network.from_edges([1, 2, 3], [(1, 2, bsc(0.1)), (2, 1, bsc(0.1))])
    model = ObservationModel.iid(net.nodes, Marginal.bernoulli(0.5))
    rep = t_lower_combined(net, model, PARITY, HAM, 0.0, 0.1)
    assert rep.combined == math.inf


def test_condition_failure_makes_entry_inapplicable():
    net, model = two_node()
    e = t_lower_cutset(net, model, PARITY, HAM, 0.0, 0.6)
    assert not e.applicable
    assert "1 - delta" in e.reason


def test_rate_distortion_gaussian_example():
    net, _ = two_node()
    model = ObservationModel.iid(net.nodes, Marginal.gaussian(0, 1))
    e = t_lower_rd(net, model, FunctionSpec.linear([1, 1]), Distortion("quadratic"), 0.01)
    assert e.value == pytest.approx(27.98, abs=0.01)


def test_rate_distortion_parity():
    net, model = two_node()
    e = t_lower_rd(net, model, PARITY, HAM, 0.05)
    assert e.value == pytest.approx((1 - binary_entropy(0.05)) / capacity(bsc(0.3)), abs=1e-6)


def test_rate_distortion_inapplicable_for_absolute_discrete():
    net = make_topology("chain", 3, {"kind": "bsc", "p": 0.1})
    model = ObservationModel.iid(net.nodes, Marginal.rademacher())
    e = t_lower_rd(net, model, FunctionSpec.linear([1, 1, 1]), Distortion("absolute"), 0.5)
    assert not e.applicable


def test_strategies():
    net = make_topology("chain", 4, {"kind": "bsc", "p": 0.1})
    assert len(CutsetStrategy("all").candidates(net)) == 14
    assert len(CutsetStrategy("singleton_complements").candidates(net)) == 4
    part = bfs_partition(net)
    assert len(CutsetStrategy("partition_prefixes", partition=part).candidates(net)) == 6
    with pytest.raises(ValueError):
        CutsetStrategy("nope")


EPS_GRID = [2.0, 1.0, 0.0]
DELTA_GRID = [0.3, 0.1, 0.01, 1e-4]


def test_monotone_in_eps_and_delta():
    net = make_topology("chain", 4, {"kind": "bsc", "p": 0.2})
    model = ObservationModel.iid(net.nodes, Marginal.rademacher())
    f, d = FunctionSpec.linear([1, 1, 1, 1]), Distortion("absolute")
    part = bfs_partition(net)
    for method in (t_lower_cutset, t_lower_sdpi_single):
        for delta in DELTA_GRID:
            vals = [method(net, model, f, d, e, delta).value for e in EPS_GRID]
            assert vals == sorted(vals)
        for eps in EPS_GRID:
            vals = [method(net, model, f, d, eps, dl).value for dl in DELTA_GRID]
            assert vals == sorted(vals)
    for delta in DELTA_GRID:
        vals = [t_lower_multicut(net, part, model, f, d, e, delta).value for e in EPS_GRID]
        assert vals == sorted(vals)


def test_multicut_h_saturation_falls_back():
    net = make_topology("chain", 4, {"kind": "bsc", "p": 0.2})
    model = ObservationModel.iid(net.nodes, Marginal.bernoulli(0.5))
    e = t_lower_multicut(net, bfs_partition(net), model, PARITY, HAM, 0.0, 0.01, H=0.1)
    assert "h_form_saturated" in e.flags
    assert math.isfinite(e.components["chain_exact"])


@st.composite
def small_networks(draw):
    n = draw(st.integers(2, 5))
    ps = st.floats(0.01, 0.45)
    edges = []
    for i in range(1, n):
        j = draw(st.integers(0, i - 1))
        edges.append((j, i, bsc(draw(ps))))
        edges.append((i, j, bsc(draw(ps))))
    return Network.from_edges(range(n), edges)


@given(small_networks(), st.data())
@settings(max_examples=20)
def test_two_block_multicut_equals_cutset(net, data):
    nodes = list(net.nodes)
    model = ObservationModel.iid(nodes, Marginal.bernoulli(0.5))
    k = data.draw(st.integers(1, len(nodes) - 1))
    first = nodes[:k]
    part = partition_from_blocks(net, [first, nodes[k:]])
    e = t_lower_multicut(net, part, model, PARITY, HAM, 0.0, 0.05)
    ref = t_lower_cutset(net, model, PARITY, HAM, 0.0, 0.05, [frozenset(nodes[k:])])
    assert e.components["cutset_plus"] == ref.value


def test_corollary_presets():
    for kind, size, deg in (("chain", 6, None), ("ring", 6, None), ("grid", 3, None), ("tree", 5, 3)):
        rep = corollary_preset(kind, size, p=0.1, eps=0.0, delta=0.1, degree=deg)
        assert rep["corollary_closed_form"].asymptotic
        assert rep["multicut"].value >= rep["multicut"].inputs["n"] - 1
        assert rep.argmax != "corollary_closed_form"
    rep = corollary_preset("dumbbell", 10, p=0.1, delta=0.1)
    assert rep["dumbbell_bridge"].value > 0
    with pytest.raises(ValueError):
        corollary_preset("star")


def test_criteria_convert():
    out = criteria_convert(lambda e, d: 10 * (1 - d) - e, "max", 0.2, delta_grid=(0.5, 0.1))
    assert out["delta"] == 0.1 and out["value"] == pytest.approx(7.0)
    assert criteria_convert(lambda e: 1 / e, "avg", 0.1, n_nodes=4)["value"] == pytest.approx(2.5)
    assert criteria_convert(lambda e: 1 / e, "excess", 0.1, d_max=1.0, delta=0.1)["value"] == pytest.approx(5.0)


def test_ayaso_limits():
    net, _ = two_node()
    out = ayaso_baseline(net, 1e-3, 1e-3, B=1.0, kappa=1.0)
    assert out["baseline_limit"] == 0.0
    with pytest.raises(ValueError):
        ayaso_baseline(net, 1e-3, 1e-3, B=2.0, kappa=0.0)


@given(st.lists(st.floats(0.3, 3.0), min_size=2, max_size=4), st.floats(0.01, 0.3))
@settings(max_examples=25)
def test_gaussian_corollary_dominates_baseline(a, delta):
    net = make_topology("chain", len(a), {"kind": "bsc", "p": 0.2})
    if not gaussian_dominance_condition(net, a, delta):
        return
    for eps in (1e-1, 1e-2, 1e-4):
        ours = t_lower_gaussian(net, a, eps, delta)
        base = continuum_fano_gaussian(net, a, eps, delta)
        assert ours.value >= base.value - 1e-12


def test_report_combined_skips_asymptotic():
    rep = corollary_preset("chain", 5, p=0.2, delta=0.1)
    counted = [e.value for e in rep.entries if e.applicable and not e.asymptotic]
    assert rep.combined == max(counted)
    d = rep.to_dict()
    assert d["combined_integer"] == ceil_time(rep.combined)
    assert isinstance(BoundReport().combined, float)
