from __future__ import annotations

import math

import numpy as np
import pytest

from dfcbounds.estimates import clopper_pearson, spawn_rng
from dfcbounds.models import Distortion, FunctionSpec, Marginal, ModelError, ObservationModel


def test_marginal_moments():
    assert Marginal.rademacher().variance == 1.0
    assert Marginal.bernoulli(0.3).mean == pytest.approx(0.3)
    assert Marginal.uniform(-1, 1).variance == pytest.approx(1 / 3)
    assert Marginal.laplace(0, 2).variance == pytest.approx(8.0)
    assert Marginal.finite([0, 1, 2], [0.2, 0.3, 0.5]).mean == pytest.approx(1.3)


def test_entropies():
    assert Marginal.bernoulli(0.5).entropy() == pytest.approx(1.0)
    assert Marginal.gaussian(0, 1).differential_entropy() == pytest.approx(0.5 * math.log2(2 * math.pi * math.e))
    assert Marginal.uniform(0, 4).differential_entropy() == pytest.approx(2.0)


def test_invalid_marginals():
    with pytest.raises(ModelError):
        Marginal.bernoulli(1.5)
    with pytest.raises(ModelError):
        Marginal.gaussian(0, -1)
    with pytest.raises(ModelError):
        Marginal.finite([0, 1], [0.5, 0.6])


def test_spec_round_trip():
    for m in (Marginal.rademacher(), Marginal.bernoulli(0.2), Marginal.gaussian(1, 2),
              Marginal.uniform(0, 3), Marginal.laplace(0, 1), Marginal.finite([0, 2], [0.5, 0.5])):
        assert Marginal.from_spec(m.to_spec()) == m


def test_sampling_matches_moments():
    rng = spawn_rng(7, 1)
    x = Marginal.laplace(0, 1).sample(rng, 200_000)
    assert x.var() == pytest.approx(2.0, rel=0.03)


def test_function_checks():
    model = ObservationModel.iid([1, 2, 3], Marginal.bernoulli(0.5))
    FunctionSpec.parity().check(model)
    with pytest.raises(ModelError):
        FunctionSpec.linear([1, 2]).check(model)
    with pytest.raises(ModelError):
        FunctionSpec.parity().check(ObservationModel.iid([1, 2], Marginal.gaussian()))
    w = np.array([[1, 0, 1], [1, 1, 1]])
    np.testing.assert_array_equal(FunctionSpec.parity().evaluate(w), [0, 1])
    np.testing.assert_array_equal(FunctionSpec.linear([1, 2, 3]).evaluate(w), [4, 6])


def test_distortion_radius():
    assert Distortion("quadratic").radius(0.04) == pytest.approx(0.2)
    assert Distortion("absolute").radius(0.3) == 0.3
    assert Distortion("hamming").radius(0.5) == 0.0
    assert Distortion("hamming").radius(1.0) == math.inf


def test_clopper_pearson_brackets():
    lo, hi = clopper_pearson(30, 100)
    assert lo < 0.3 < hi
    assert clopper_pearson(0, 50)[0] == 0.0
    assert clopper_pearson(50, 50)[1] == 1.0


def test_spawn_rng_is_keyed():
    a = spawn_rng(1, 2, 3).random(4)
    b = spawn_rng(1, 2, 3).random(4)
    c = spawn_rng(1, 3, 2).random(4)
    np.testing.assert_array_equal(a, b)
    assert not np.array_equal(a, c)
