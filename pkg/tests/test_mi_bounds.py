from __future__ import annotations

import math

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from dfcbounds.infotheory import binary_entropy
from dfcbounds.mi_bounds import (
    ChainParams,
    chain_closed_C,
    chain_closed_H,
    chain_mi_chernoff,
    chain_mi_closed,
    chain_mi_recursion_dp,
    chain_mi_weakened,
    etas_from_degrees,
    mi_lower_gaussian_quadratic,
    mi_lower_smallball,
    mi_upper_cutset,
    mi_upper_sdpi,
    rd_function_discrete,
)


def test_smallball_values():
    lb = mi_lower_smallball(0.5, 0.1)
    assert lb.valid
    assert lb.value == pytest.approx(0.9 - binary_entropy(0.1))
    assert mi_lower_smallball(0.0, 0.1).value == math.inf
    assert not mi_lower_smallball(0.95, 0.1).valid


@given(st.floats(0.01, 1.0), st.floats(0.0, 0.5), st.floats(0.0, 0.5))
def test_smallball_monotone_in_delta(L, d1, d2):
    lo, hi = sorted((d1, d2))
    assert mi_lower_smallball(L, lo).value >= mi_lower_smallball(L, hi).value - 1e-12


@pytest.mark.parametrize("eps", [0.0, 0.05, 0.11, 0.3, 0.49])
def test_rd_uniform_binary_hamming(eps):
    d = 1.0 - np.eye(2)
    assert rd_function_discrete([0.5, 0.5], d, eps) == pytest.approx(1 - binary_entropy(eps), abs=1e-7)


def test_rd_biased_binary_and_edges():
    d = 1.0 - np.eye(2)
    # R(D) = h2(p) - h2(D) for D < min(p, 1-p)
    assert rd_function_discrete([0.2, 0.8], d, 0.05) == pytest.approx(binary_entropy(0.2) - binary_entropy(0.05),
                                                                     abs=1e-7)
    assert rd_function_discrete([0.2, 0.8], d, 0.2) == pytest.approx(0.0, abs=1e-9)
    assert rd_function_discrete([0.2, 0.8], d, 0.5) == 0.0


def test_rd_quaternary_hamming():
    # uniform m-ary source: log m - h2(D) - D log(m-1)
    m, D = 4, 0.1
    ref = math.log2(m) - binary_entropy(D) - D * math.log2(m - 1)
    assert rd_function_discrete([0.25] * 4, 1.0 - np.eye(4), D) == pytest.approx(ref, abs=1e-7)


def test_gaussian_quadratic_example():
    h = 0.5 * math.log2(2 * math.pi * math.e)
    assert mi_lower_gaussian_quadratic(h, 0.01) == pytest.approx(0.5 * math.log2(100))


def test_single_cutset_upper_bounds():
    assert mi_upper_cutset(0.5, 4) == 2.0
    assert mi_upper_sdpi(1.0, 3, eta=0.16) == pytest.approx(1 - 0.84 ** 3)
    assert mi_upper_sdpi(1.0, 3, eta_star=0.16, in_degree=2) == pytest.approx(1 - 0.84 ** 6)


@pytest.mark.parametrize("n", [2, 3, 6])
def test_dp_matches_closed_forms(n):
    for T in range(n - 1, 25):
        for form in ("H", "C"):
            kw = {form: 1.3}
            p = ChainParams(n, T, 0.3, **kw)
            assert chain_mi_recursion_dp(p).value == pytest.approx(chain_mi_closed(p).value, abs=1e-10)


def test_n2_c_form_is_cutset():
    assert chain_closed_C(2, 7, 0.4, 0.5) == pytest.approx(3.5)


def test_zero_law():
    for n in range(2, 7):
        for T in range(0, n - 1):
            assert chain_closed_H(n, T, 0.5, 1.0) == 0.0
            assert chain_mi_recursion_dp(ChainParams(n, T, 0.5, H=1.0, C=1.0)).value == 0.0


@given(st.integers(2, 7), st.integers(0, 30), st.lists(st.floats(0.0, 1.0), min_size=6, max_size=6),
       st.floats(0.1, 2.0), st.floats(0.1, 2.0))
def test_weakened_dominates_dp_with_per_node_etas(n, extra, etas, H, C):
    T = n - 1 + extra
    p = ChainParams(n, T, tuple(etas[: n - 1]), H=H, C=C)
    assert chain_mi_weakened(p).value >= chain_mi_recursion_dp(p).value - 1e-10


@given(st.integers(2, 7), st.integers(0, 30), st.floats(0.0, 1.0))
def test_dp_bounded_by_each_form(n, extra, eta):
    T = n - 1 + extra
    both = chain_mi_recursion_dp(ChainParams(n, T, eta, H=1.0, C=0.2)).value
    assert both <= chain_closed_H(n, T, eta, 1.0) + 1e-10
    assert both <= chain_closed_C(n, T, eta, 0.2) + 1e-10


def test_chain_monotone_in_T():
    vals = [chain_mi_closed(ChainParams(5, T, 0.3, H=1.0)).value for T in range(0, 40)]
    assert all(b >= a - 1e-15 for a, b in zip(vals, vals[1:]))


def test_etas_from_degrees():
    assert etas_from_degrees(0.16, [1, 2]) == pytest.approx((0.16, 0.2944))


def test_chernoff_form():
    # n=10, eta=gamma=0.5: (n-3)^2 gamma^2 / eta = 24.5 and the exponent is -2 (0.5)^2 7 = -3.5
    assert chain_mi_chernoff(10, 9, 0.5, 0.5, 1.0) == pytest.approx(24.5 * math.exp(-3.5))
    assert chain_mi_chernoff(10, 10, 0.5, 0.5, 1.0) is None
    assert chain_mi_chernoff(3, 2, 0.5, 0.5, 1.0) is None
