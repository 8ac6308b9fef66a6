from __future__ import annotations

import itertools
import math

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from dfcbounds.concentration import (
    csbp_bruteforce,
    discrete_sum_pmf,
    expected_csbp,
    levy_discrete,
    levy_erdos_LO,
    levy_gaussian,
    levy_logconcave_bound,
    levy_third_moment,
    levy_vector_RV,
)
from dfcbounds.models import Distortion, FunctionSpec, Marginal, ObservationModel


def _joint(model):
    supports = [m.support() for m in model.marginals]
    joint = {}
    for combo in itertools.product(*[range(len(s[0])) for s in supports]):
        w = tuple(float(supports[j][0][c]) for j, c in enumerate(combo))
        joint[w] = joint.get(w, 0.0) + math.prod(supports[j][1][c] for j, c in enumerate(combo))
    return joint


def test_gaussian_exact_and_bound():
    exact, bound = levy_gaussian(2.0, 0.1)
    assert exact == pytest.approx(0.0563719, abs=1e-6)
    assert bound == pytest.approx(0.0564190, abs=1e-6)


@pytest.mark.parametrize("k,expected", [(1, 0.5), (2, 0.5), (4, 0.375), (5, 0.3125), (10, 252 / 1024)])
def test_erdos_values(k, expected):
    assert levy_erdos_LO(k) == pytest.approx(expected, abs=1e-12)


def test_erdos_stirling():
    assert levy_erdos_LO(100) / math.sqrt(2 / (math.pi * 100)) == pytest.approx(1.0, abs=0.003)


def test_logconcave_uniform_example():
    lo, hi = levy_logconcave_bound(2 / 12, 0.1)
    assert lo == pytest.approx(0.1400, abs=1e-4)
    assert hi == pytest.approx(0.4851, abs=1e-4)


def test_third_moment_example():
    assert levy_third_moment(0.01, 1.0, 0.1, 10.0, c=1.0, setsize=1) == pytest.approx(0.02)


def test_vector_stable_rank():
    out = levy_vector_RV(np.diag([2.0, 1.0, 1.0]), 0.5)
    assert out["stable_rank"] == 1
    assert out["bound"] == pytest.approx(0.5 ** 0.9)
    out = levy_vector_RV(np.eye(4), 0.5)
    assert out["stable_rank"] == 4


def test_rademacher_sum_of_four():
    model = ObservationModel.iid(range(4), Marginal.rademacher())
    est = expected_csbp(model, FunctionSpec.linear([1] * 4), Distortion("absolute"), [], 0.0)
    assert est.method == "exact"
    assert est.value == pytest.approx(0.375)


def test_parity_and_identity():
    model = ObservationModel.iid([1, 2], Marginal.bernoulli(0.5))
    assert expected_csbp(model, FunctionSpec.parity(), Distortion("hamming"), ["2"], 0.0).value == 0.5
    m5 = ObservationModel.iid(range(3), Marginal.finite([0, 1, 2, 3, 4], [0.2] * 5))
    assert expected_csbp(m5, FunctionSpec.identity(), Distortion("hamming"), ["0"], 0.0).value == pytest.approx(0.04)


def test_uniform_quadrature_and_monte_carlo_agree():
    model = ObservationModel.iid([1, 2], Marginal.uniform(-0.5, 0.5))
    f, d = FunctionSpec.linear([1, 1]), Distortion("absolute")
    quad = expected_csbp(model, f, d, [], 0.1)
    assert quad.method == "quadrature"
    assert quad.value == pytest.approx(0.19, abs=1e-6)
    lap = ObservationModel(["1", "2", "3"], (Marginal.laplace(0, 1), Marginal.uniform(-1, 1),
                                             Marginal.laplace(0, 0.5)))
    q2 = expected_csbp(lap, FunctionSpec.linear([1, 1, 1]), d, [], 0.2)
    # symmetric unimodal sum: the best window is centred at 0
    rng = np.random.default_rng(11)
    x = rng.laplace(0, 1, 400_000) + rng.uniform(-1, 1, 400_000) + rng.laplace(0, 0.5, 400_000)
    assert abs(q2.value - np.mean(np.abs(x) <= 0.2)) < 4e-3


def test_monte_carlo_reports_interval():
    model = ObservationModel([1, 2], (Marginal.gaussian(0, 1), Marginal.finite([0, 5], [0.5, 0.5])))
    est = expected_csbp(model, FunctionSpec.linear([1, 1]), Distortion("absolute"), [], 0.3,
                        samples=100_000, seed=1)
    assert est.method == "monte_carlo"
    lo, hi = est.ci
    assert lo <= est.value <= hi
    # the larger Gaussian window is P[|N| <= 0.3] / 2 (atoms at 0 and 5 are far apart)
    target = levy_gaussian(1.0, 0.3)[0] / 2
    assert lo - 0.01 <= target <= hi + 0.01


finite_marginals = st.lists(st.floats(0.05, 1.0), min_size=2, max_size=3).map(
    lambda w: Marginal.finite(list(range(len(w))), list(np.array(w) / sum(w))))


@given(st.lists(finite_marginals, min_size=2, max_size=4),
       st.lists(st.integers(-3, 3), min_size=4, max_size=4),
       st.sampled_from([0.0, 0.5, 1.0, 2.0]), st.data())
def test_exact_matches_bruteforce(margs, coefs, eps, data):
    n = len(margs)
    a = coefs[:n]
    model = ObservationModel(range(n), tuple(margs))
    S = data.draw(st.sets(st.integers(0, n - 1)))
    f = FunctionSpec.linear(a)
    dist = Distortion("absolute")
    est = expected_csbp(model, f, dist, [str(i) for i in S], eps)
    ref = csbp_bruteforce(_joint(model), lambda w: float(np.dot(a, w)), dist, sorted(S), eps)
    assert est.value == pytest.approx(ref, abs=1e-12)


@given(st.lists(st.integers(-5, 5).filter(bool), min_size=1, max_size=12))
def test_rademacher_sums_respect_erdos(a):
    values, pmf = discrete_sum_pmf([(x, Marginal.rademacher()) for x in a])
    assert levy_discrete(values, pmf, 0.0) <= levy_erdos_LO(len(a)) + 1e-12


@given(st.floats(0.05, 5.0), st.floats(0.0, 3.0))
def test_gaussian_exact_below_bound(sigma2, eps):
    exact, bound = levy_gaussian(sigma2, eps)
    assert exact <= bound + 1e-12


def test_levy_discrete_window_is_closed():
    assert levy_discrete([0.0, 1.0], [0.5, 0.5], 0.5) == pytest.approx(1.0)
    assert levy_discrete([0.0, 1.0], [0.5, 0.5], 0.4999) == pytest.approx(0.5)
