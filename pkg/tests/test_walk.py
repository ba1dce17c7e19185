"""Sampling engine: distributions, reproducibility, decompositions, events."""

import numpy as np
import pytest

from hypwalk import engines
from hypwalk.errors import ElementaryDistributionError, PreconditionError
from hypwalk.models.farey import FareyModel, L, R
from hypwalk.models.free import FreeGroupModel, FreeWord
from hypwalk.walk import (
    StepDistribution,
    assert_nonelementary,
    diagonal_shadow_event,
    find_independent_loxodromics,
    iterated_decomposition,
    midpoint_shadow_event,
    reflected,
    sample_walk,
    walk_csv_rows,
)

free = FreeGroupModel()
farey = FareyModel()
W = FreeWord.from_str


def uniform_free():
    return StepDistribution([W("a"), W("A"), W("b"), W("B")], [0.25] * 4)


def uniform_farey():
    return StepDistribution([R, L, R.inverse(), L.inverse()], [0.25] * 4)


def test_distribution_validation():
    with pytest.raises(ValueError):
        StepDistribution([], [])
    with pytest.raises(ValueError):
        StepDistribution([W("a")], [0.5])
    with pytest.raises(ValueError):
        StepDistribution([W("a"), W("b")], [1.0, -0.1])
    with pytest.raises(ValueError):
        StepDistribution([W("a"), W("a")], [0.5, 0.5])
    StepDistribution([W("a"), W("b")], [0.5, 0.5 + 1e-13])  # inside tolerance


def test_reflected():
    d = StepDistribution([W("a"), W("b")], [0.7, 0.3])
    r = reflected(d)
    assert [w.to_str() for w in r.support] == ["A", "B"]
    assert np.allclose(r.weights, [0.7, 0.3])
    rr = reflected(r)
    assert [w.to_str() for w in rr.support] == ["a", "b"]
    sym = uniform_free()
    refl = reflected(sym)
    assert set(sym.support) == set(refl.support)
    fr = reflected(StepDistribution([R, L], [0.5, 0.5]))
    assert fr.support == (R.inverse(), L.inverse())


def test_deterministic_walk():
    d = StepDistribution([W("a")], [1.0])
    ws = sample_walk(free, d, 5, seed=0)
    assert [w.to_str() for w in ws.locations] == ["", "a", "aa", "aaa", "aaaa", "aaaaa"]
    ws0 = sample_walk(free, d, 0, seed=0)
    assert len(ws0.locations) == 1 and ws0.locations[0].is_identity()
    with pytest.raises(ValueError):
        sample_walk(free, d, -1, seed=0)


def test_reproducibility_and_stream_separation():
    d = uniform_free()
    a = sample_walk(free, d, 50, seed=123, stream=7)
    b = sample_walk(free, d, 50, seed=123, stream=7)
    c = sample_walk(free, d, 50, seed=123, stream=8)
    assert a.steps == b.steps
    assert a.steps != c.steps
    assert np.array_equal(a.distances, b.distances)


def test_walk_speed_classical():
    # simple random walk on the 4-regular tree moves at speed 1/2
    d = uniform_free()
    ws = sample_walk(free, d, 10_000, seed=42)
    rate = free.distance(free.identity(), ws.locations[-1]) / 10_000
    assert abs(rate - 0.5) <= 0.05


def test_triangle_bound_along_walk():
    d = uniform_farey()
    ws = sample_walk(farey, d, 40, seed=9)
    dist = ws.distances
    for i in range(40):
        step = farey.distance(ws.locations[i], ws.locations[i + 1])
        assert dist[i + 1] <= dist[i] + step


def test_iterated_decomposition_examples():
    from hypwalk.walk import WalkSample

    ws = WalkSample(free, 0, 0, [W("a"), W("A")])
    dec = iterated_decomposition(free, ws, 1)
    assert dec.Y.tolist() == [1, 1]
    assert dec.X.tolist() == [1, -1]
    assert dec.Z.tolist() == [0, 2]

    d = StepDistribution([W("a")], [1.0])
    ws2 = sample_walk(free, d, 12, seed=0)
    for k in (1, 2, 3):
        dec2 = iterated_decomposition(free, ws2, k)
        assert np.all(dec2.Z == 0)
        assert np.all(dec2.Y == k)
    with pytest.raises(ValueError):
        iterated_decomposition(free, ws2, 0)


def test_decomposition_invariants_random():
    d = uniform_free()
    for stream in range(5):
        ws = sample_walk(free, d, 60, seed=77, stream=stream)
        for k in (1, 2, 5, 6):
            dec = iterated_decomposition(free, ws, k)
            n_iter = 60 // k
            assert len(dec.X) == n_iter
            assert np.all(dec.Z >= 0)
            assert dec.X.sum() == ws.distances[k * n_iter]


def test_midpoint_event():
    d = StepDistribution([W("a")], [1.0])
    ws = sample_walk(free, d, 10, seed=0)
    assert midpoint_shadow_event(free, ws)
    from hypwalk.walk import WalkSample

    ws2 = WalkSample(free, 0, 0, [W("a"), W("A")])
    assert not midpoint_shadow_event(free, ws2)
    ws3 = sample_walk(free, d, 7, seed=0)
    with pytest.raises(PreconditionError):
        midpoint_shadow_event(free, ws3)


def test_diagonal_event():
    d = StepDistribution([W("a")], [1.0])
    v = sample_walk(free, d, 6, seed=0)
    w = sample_walk(free, d, 6, seed=1)
    assert diagonal_shadow_event(free, v, w, r=6.0)  # both equal a^6
    assert diagonal_shadow_event(free, v, w, r=-1.0)
    with pytest.raises(PreconditionError):
        diagonal_shadow_event(free, v, sample_walk(free, d, 5, seed=0), r=0)
    b = StepDistribution([W("B")], [1.0])
    wb = sample_walk(free, b, 6, seed=0)
    assert not diagonal_shadow_event(free, v, wb, r=3.0)


def test_nonelementarity_check():
    assert find_independent_loxodromics(free, uniform_free()) is not None
    assert find_independent_loxodromics(farey, uniform_farey()) is not None
    only_a = StepDistribution([W("a"), W("A")], [0.5, 0.5])
    assert find_independent_loxodromics(free, only_a) is None
    only_r = StepDistribution([R], [1.0])
    with pytest.raises(ElementaryDistributionError):
        assert_nonelementary(farey, only_r)
    # parabolic pair still generates a non-elementary group
    assert_nonelementary(farey, uniform_farey())


def test_alias_sampling_matches_weights():
    d = StepDistribution([W("a"), W("b"), W("ab")], [0.6, 0.3, 0.1])
    from hypwalk.walk import stream_generator

    gen = stream_generator(5, 0)
    idx = d.draw_indices(gen, 200_000)
    freq = np.bincount(idx, minlength=3) / 200_000
    assert np.allclose(freq, [0.6, 0.3, 0.1], atol=0.01)


def test_walk_csv_rows():
    d = StepDistribution([W("a")], [1.0])
    ws = sample_walk(free, d, 3, seed=0)
    rows = list(walk_csv_rows(free, [ws]))
    assert rows[0] == (0, 1, "a", 1.0)
    assert rows[-1] == (0, 3, "a", 3.0)


def test_engine_matches_per_sample_walks():
    d = uniform_free()
    traj = engines.free_distance_trajectories(d, [10, 25], samples=6, seed=31)
    taus = engines.free_translation_lengths(d, [25], samples=6, seed=31)
    for i in range(6):
        ws = sample_walk(free, d, 25, seed=31, stream=i)
        assert traj[10][i] == ws.distances[10]
        assert traj[25][i] == ws.distances[25]
        assert taus[25][i] == free.translation_length(ws.locations[25])

    fd = uniform_farey()
    st = engines.farey_checkpoint_stats(fd, [8, 16], samples=5, seed=13,
                                        want_distance=True)
    for i in range(5):
        ws = sample_walk(farey, fd, 16, seed=13, stream=i)
        assert st[16]["distance"][i] == ws.distances[16]
        assert st[8]["trace_small"][i] == (abs(ws.locations[8].trace()) <= 2)


def test_engine_segment_increments_match_decomposition():
    d = uniform_free()
    k, n_iter, samples = 5, 6, 4
    Y, D = engines.free_segment_increments(d, k, n_iter, samples, seed=53)
    for i in range(samples):
        ws = sample_walk(free, d, k * n_iter, seed=53, stream=i)
        dec = iterated_decomposition(free, ws, k)
        assert np.array_equal(Y[:, i], dec.Y.astype(np.int64))
        X = np.diff(np.concatenate([[0], D[:, i]]))
        assert np.array_equal(X, dec.X.astype(np.int64))


def test_engine_threads_do_not_change_output():
    d = uniform_free()
    base = engines.free_distance_trajectories(d, [20], samples=40_000, seed=3)
    threaded = engines.free_distance_trajectories(d, [20], samples=40_000, seed=3,
                                                  threads=4)
    assert np.array_equal(base[20], threaded[20])


def test_engine_multi_letter_support():
    d = StepDistribution([W("ab"), W("BA"), W("aa")], [0.4, 0.4, 0.2])
    traj = engines.free_distance_trajectories(d, [15], samples=8, seed=61)
    for i in range(8):
        ws = sample_walk(free, d, 15, seed=61, stream=i)
        assert traj[15][i] == ws.distances[15]
