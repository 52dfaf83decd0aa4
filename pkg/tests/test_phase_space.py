import json

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st
from hypothesis.extra.numpy import arrays

from qubitent.phase_space import (
    BASIS, CHARACTERS, POINTS, PhasePoint, SignedDistribution, character_transform,
    inverse_character_transform, marginals, random_signed_weights,
)

HALF_X = [0.25, 0.25, 0.25, 0.25, 0, 0, 0, 0]


def test_points_are_bijective_with_index():
    assert len({(p.a, p.b, p.c) for p in POINTS}) == 8
    for i, p in enumerate(POINTS):
        assert p.index == i
        assert PhasePoint.from_index(i) == p
    assert str(PhasePoint(1, 0, 1)) == "w101"


def test_phase_point_rejects_non_bits():
    with pytest.raises(ValueError):
        PhasePoint(2, 0, 0)
    with pytest.raises(ValueError):
        PhasePoint.from_index(8)


def test_characters_orthogonal():
    gram = CHARACTERS @ CHARACTERS.T
    assert np.array_equal(gram, 8 * np.eye(8))


def test_character_sign_convention():
    # +1 where the outcome of that measurement is 0
    assert list(BASIS["x"]) == [1, 1, 1, 1, -1, -1, -1, -1]
    assert list(BASIS["y"]) == [1, 1, -1, -1, 1, 1, -1, -1]
    assert list(BASIS["z"]) == [1, -1, 1, -1, 1, -1, 1, -1]
    assert np.array_equal(BASIS["xyz"], BASIS["x"] * BASIS["y"] * BASIS["z"])


@pytest.mark.parametrize("weights, expected", [
    ([1 / 8] * 8, [1, 0, 0, 0, 0, 0, 0, 0]),
    ([1, 0, 0, 0, 0, 0, 0, 0], [1] * 8),
    (HALF_X, [1, 1, 0, 0, 0, 0, 0, 0]),
])
def test_character_transform_examples(weights, expected):
    assert np.allclose(character_transform(SignedDistribution(weights)), expected, atol=1e-15)


@pytest.mark.parametrize("weights, expected", [
    ([1 / 8] * 8, (0.5, 0.5, 0.5)),
    ([1, 0, 0, 0, 0, 0, 0, 0], (1, 1, 1)),
    (HALF_X, (1, 0.5, 0.5)),
])
def test_marginal_examples(weights, expected):
    assert marginals(SignedDistribution(weights)) == pytest.approx(expected, abs=1e-15)


def test_round_trip_and_constant_coefficient(rng):
    w = random_signed_weights(rng, 1000)
    c = character_transform(w)
    assert np.abs(inverse_character_transform(c) - w).max() <= 1e-14
    assert np.abs(c[:, 0] - 1).max() <= 1e-12


def test_marginals_match_character_coordinates(rng):
    for w in random_signed_weights(rng, 200):
        c = character_transform(w)
        assert marginals(w) == pytest.approx((1 + c[1:4]) / 2, abs=1e-13)


@settings(max_examples=200, deadline=None)
@given(arrays(float, 8, elements=st.floats(0, 1)).filter(lambda w: w.sum() > 1e-3))
def test_unsigned_marginals_are_frequencies(w):
    f = marginals(w / w.sum())
    assert all(-1e-12 <= v <= 1 + 1e-12 for v in f)


def test_signed_distribution_validation():
    with pytest.raises(ValueError):
        SignedDistribution([0.5] * 8)
    with pytest.raises(ValueError):
        SignedDistribution([1.0] * 3)
    q = SignedDistribution([1.5, -0.5, 0, 0, 0, 0, 0, 0])
    assert not q.is_unsigned
    with pytest.raises(ValueError):
        q.weights[0] = 2.0


def test_json_round_trip():
    q = SignedDistribution([0.375, 0.125, 0.125, -0.125, 0.375, 0.125, 0.125, -0.125])
    assert json.loads(q.to_json()) == q.weights.tolist()
    assert SignedDistribution.from_json(q.to_json()) == q
    assert SignedDistribution.uniform() == SignedDistribution([0.125] * 8)
    assert SignedDistribution.point_mass(5).weights[5] == 1.0
