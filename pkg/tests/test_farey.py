"""Farey model: slope arithmetic, the distance algorithm against the BFS
oracle, trace classification, and translation length."""

import math

import numpy as np
import pytest

from hypwalk.models.farey import (
    IDENTITY,
    INFINITY,
    L,
    R,
    FareyElement,
    FareyModel,
    Slope,
    bounded_bfs_distances,
    classify,
    conjugacy_min_length,
    dist_to_infinity,
    evaluate_generator_word,
    matrix_to_generator_word,
    mobius_to_infinity,
    slope_distance,
    translation_length_detail,
)

model = FareyModel()


def test_slope_normalization():
    assert Slope(2, 4) == Slope(1, 2)
    assert Slope(-2, -4) == Slope(1, 2)
    assert Slope(3, -6) == Slope(-1, 2)
    assert Slope(5, 0) == INFINITY
    assert Slope.from_str("1/0") == INFINITY
    assert Slope.from_str("-3/7") == Slope(-3, 7)
    with pytest.raises(ValueError):
        Slope.from_str("x/y")


def test_matrix_basics():
    assert (R * L).entries() == (2, 1, 1, 1)
    assert FareyElement(2, 1, 1, 1).inverse().entries() == (1, -1, -1, 2)
    assert (R * R.inverse()) == IDENTITY
    with pytest.raises(ValueError):
        FareyElement(1, 0, 0, 2)
    assert FareyElement.from_str("[[1,1],[0,1]]") == R
    assert FareyElement.from_str(" [[ 1 , 0 ],[ 1 , 1 ]] ") == L
    with pytest.raises(ValueError):
        FareyElement.from_str("[[1,1],[0]]")


def test_action_and_improper_metric():
    assert L.apply(INFINITY) == Slope(1, 1)
    assert R.apply(INFINITY) == INFINITY
    one = model.identity()
    assert model.distance(one, L) == 1
    assert model.distance(one, R) == 0  # improper: R fixes the basepoint
    g = R * L * R
    h = L * R
    assert model.distance(g, h) == model.distance(one, g.inverse() * h)


def test_adjacency_and_small_distances():
    assert slope_distance(Slope(1, 0), Slope(0, 1)) == 1
    assert slope_distance(Slope(1, 0), Slope(1, 1)) == 1
    # the documented geodesic infinity, 0/1, 1/2, 2/5
    assert slope_distance(Slope(1, 0), Slope(2, 5)) == 3
    assert slope_distance(Slope(2, 5), Slope(2, 5)) == 0
    assert dist_to_infinity(7, 1) == 1
    assert dist_to_infinity(1, 7) == 2  # 1/7 - 0 - infinity


def test_translation_invariance_of_distance():
    rng = np.random.default_rng(2)
    for _ in range(200):
        q = int(rng.integers(1, 80))
        p = int(rng.integers(-200, 200))
        if math.gcd(abs(p), q) != 1:
            continue
        assert dist_to_infinity(p, q) == dist_to_infinity(p + q, q)
        assert dist_to_infinity(p, q) == dist_to_infinity(-p, q)


def test_mobius_normalizer():
    rng = np.random.default_rng(3)
    for _ in range(200):
        s = Slope(int(rng.integers(-50, 51)), int(rng.integers(0, 40)))
        g = mobius_to_infinity(s)
        assert g.apply(s) == INFINITY


def test_distance_matches_bfs_oracle_small():
    oracle = bounded_bfs_distances(q_max=24, value_bound=4)
    checked = 0
    for q in range(1, 25):
        for p in range(0, q):
            if math.gcd(p, q) != 1:
                continue
            s = Slope(p, q)
            assert slope_distance(INFINITY, s) == oracle[s], s
            checked += 1
    assert checked > 100


def test_metric_axioms_on_slopes():
    rng = np.random.default_rng(4)
    slopes = [Slope(int(rng.integers(-40, 41)), int(rng.integers(0, 30)))
              for _ in range(60)]
    for _ in range(300):
        u, v, w = (slopes[int(i)] for i in rng.integers(0, len(slopes), 3))
        duv = slope_distance(u, v)
        assert duv == slope_distance(v, u)
        assert duv <= slope_distance(u, w) + slope_distance(w, v)
        assert (duv == 0) == (u == v)


def test_classification():
    assert classify(FareyElement(2, 1, 1, 1)) == "pseudo_anosov"
    assert classify(R) == "reducible_parabolic"
    assert classify(FareyElement(0, -1, 1, 0)) == "periodic_elliptic"
    assert classify(IDENTITY) == "identity"
    assert classify(FareyElement(-1, 0, 0, -1)) == "identity"


def test_translation_length_parabolic_and_anosov():
    res = translation_length_detail(R, 64)
    assert res.value == 0.0 and res.stabilized
    res = translation_length_detail(FareyElement(2, 1, 1, 1), 64)
    assert res.value == 1.0 and res.stabilized
    with pytest.raises(ValueError):
        translation_length_detail(R, 0)


def test_translation_length_powers_against_oracle():
    # d(1, M^m) for M = [[2,1],[1,1]] checked against the BFS oracle while
    # the denominators stay inside the oracle's range
    oracle = bounded_bfs_distances(q_max=64, value_bound=4)
    m = IDENTITY
    g = FareyElement(2, 1, 1, 1)
    for power in range(1, 6):
        m = m * g
        s = Slope(m.a, m.c)
        if s in oracle:
            assert oracle[s] == power
    det = translation_length_detail(g, 64)
    assert det.increments[-8:] == (1,) * 8


def test_anosov_iff_positive_translation_length():
    rng = np.random.default_rng(5)
    for _ in range(60):
        g = model.sample_element(rng, 10)
        det = translation_length_detail(g, 48)
        if not det.stabilized:
            continue
        assert (det.value > 0) == (classify(g) == "pseudo_anosov"), g


def test_word_decomposition_roundtrip():
    rng = np.random.default_rng(6)
    for _ in range(300):
        g = model.sample_element(rng, 14)
        assert evaluate_generator_word(matrix_to_generator_word(g)) == g
    assert evaluate_generator_word(matrix_to_generator_word(IDENTITY)) == IDENTITY
    neg = FareyElement(-1, 0, 0, -1)
    assert evaluate_generator_word(matrix_to_generator_word(neg)) == neg


def test_conjugacy_upper_bound():
    rng = np.random.default_rng(7)
    one = model.identity()
    for _ in range(60):
        v = model.sample_element(rng, 6)
        s = R * L  # translation length 1, conjugacy length 1
        g = v * s * v.inverse()
        res = conjugacy_min_length(g)
        assert not res.exact
        assert res.length <= model.distance(one, g)
        conj = res.conjugator
        back = conj.inverse() * g * conj
        assert model.distance(one, back) == res.length


def test_determinant_preserved_under_long_products():
    rng = np.random.default_rng(8)
    g = IDENTITY
    for _ in range(300):
        g = g * model.sample_element(rng, 1)
    assert g.a * g.d - g.b * g.c == 1  # exact at arbitrary precision
