import math

import numpy as np
import pytest

from pfol.rng import GAMMA, Rng, _fnv1a64, _mix64_int

MASK = (1 << 64) - 1


def mix64_reference(z):
    # independent reimplementation with plain python ints
    z &= MASK
    z = ((z ^ (z >> 30)) * 0xBF58476D1CE4E5B9) & MASK
    z = ((z ^ (z >> 27)) * 0x94D049BB133111EB) & MASK
    return (z ^ (z >> 31)) & MASK


def splitmix_word_reference(key, i):
    return mix64_reference((key + (GAMMA * i) % (1 << 64)) % (1 << 64))


def test_mix64_matches_reference():
    for z in [0, 1, 0xDEADBEEF, MASK, 0x9E3779B97F4A7C15]:
        assert _mix64_int(z) == mix64_reference(z)


def test_uniform_stream_matches_reference_words():
    rng = Rng(42)
    key = rng.key
    u = rng.uniforms(8)
    for i in range(8):
        word = splitmix_word_reference(key, i)
        expect = ((word >> 11) + 1) * 2.0**-53
        assert u[i] == expect


def test_uniforms_in_half_open_unit_interval():
    u = Rng(0).uniforms(100000)
    assert np.all(u > 0.0)
    assert np.all(u <= 1.0)


def test_same_seed_same_stream():
    a = Rng(7).uniforms(1000)
    b = Rng(7).uniforms(1000)
    assert np.array_equal(a, b)


def test_different_seeds_differ():
    a = Rng(7).uniforms(1000)
    b = Rng(8).uniforms(1000)
    assert not np.array_equal(a, b)


def test_counter_advances_across_calls():
    rng = Rng(3)
    first = rng.uniforms(5)
    second = rng.uniforms(5)
    both = Rng(3).uniforms(10)
    assert np.array_equal(np.concatenate([first, second]), both)


def test_substream_key_derivation():
    rng = Rng(11)
    sub = rng.substream("adversary/0")
    expect_key = _mix64_int(rng.key ^ _fnv1a64(b"adversary/0"))
    assert sub.key == expect_key
    assert sub.counter == 0


def test_substream_independent_of_parent_consumption():
    a = Rng(11)
    a.uniforms(123)
    b = Rng(11)
    assert np.array_equal(a.substream("x").uniforms(50), b.substream("x").uniforms(50))


def test_substreams_with_distinct_labels_differ():
    rng = Rng(5)
    assert not np.array_equal(rng.substream("a").uniforms(100), rng.substream("b").uniforms(100))


def test_gaussian_pairing_consumes_two_uniforms_each():
    # draw j uses uniforms 2j and 2j+1 of the remaining stream
    rng = Rng(19)
    u = Rng(19).uniforms(8)
    g = rng.gaussians(4)
    for j in range(4):
        r = math.sqrt(-2.0 * math.log(u[2 * j]))
        expect = r * math.cos(2.0 * math.pi * u[2 * j + 1])
        assert g[j] == pytest.approx(expect, abs=0.0)


def test_gaussian_moments():
    g = Rng(123).gaussians(200000)
    n = g.size
    assert abs(g.mean()) < 4.0 / math.sqrt(n)
    assert abs(g.var() - 1.0) < 6.0 / math.sqrt(n)


def test_sphere_unit_norm():
    rng = Rng(2)
    for n in (1, 2, 3, 10):
        u = rng.sphere(n)
        assert u.shape == (n,)
        assert abs(np.linalg.norm(u) - 1.0) < 1e-12


def test_ball_inside_unit_ball():
    rng = Rng(2)
    for n in (1, 2, 3, 10):
        x = rng.ball(n)
        assert np.linalg.norm(x) <= 1.0 + 1e-12


def test_sphere_consumes_2n_uniforms():
    n = 6
    rng = Rng(31)
    rng.sphere(n)
    tail_after = rng.uniforms(4)
    flat = Rng(31)
    flat.uniforms(2 * n)
    assert np.array_equal(tail_after, flat.uniforms(4))


def test_ball_consumes_2n_plus_1_uniforms():
    n = 6
    rng = Rng(31)
    rng.ball(n)
    tail_after = rng.uniforms(4)
    flat = Rng(31)
    flat.uniforms(2 * n + 1)
    assert np.array_equal(tail_after, flat.uniforms(4))


def test_ball_radius_uses_last_uniform():
    n = 3
    rng = Rng(77)
    x = rng.ball(n)
    u = Rng(77).uniforms(2 * n + 1)
    assert np.linalg.norm(x) == pytest.approx(u[2 * n] ** (1.0 / n), rel=1e-12)


def test_sphere_batch_matches_sequential():
    for seed in (0, 9):
        batch = Rng(seed).sphere_batch(20, 4)
        seq = Rng(seed)
        rows = np.stack([seq.sphere(4) for _ in range(20)])
        assert np.array_equal(batch, rows)


def test_ball_batch_matches_sequential():
    batch = Rng(13).ball_batch(15, 3)
    seq = Rng(13)
    rows = np.stack([seq.ball(3) for _ in range(15)])
    assert np.array_equal(batch, rows)


def test_batch_advances_counter_like_sequential():
    a = Rng(4)
    a.sphere_batch(10, 5)
    b = Rng(4)
    for _ in range(10):
        b.sphere(5)
    assert a.counter == b.counter
    assert np.array_equal(a.uniforms(8), b.uniforms(8))


def test_ball_mean_square_norm():
    # E||u||^2 over the unit ball is n/(n+2): integral of r^2 * n r^(n-1) dr on [0,1]
    n = 2
    draws = 100000
    x = Rng(99).ball_batch(draws, n)
    sq = np.sum(x * x, axis=1)
    se = sq.std() / math.sqrt(draws)
    assert abs(sq.mean() - n / (n + 2.0)) < 3.0 * se


def test_sphere_mean_is_zero():
    x = Rng(55).sphere_batch(50000, 3)
    assert np.all(np.abs(x.mean(axis=0)) < 4.0 / math.sqrt(50000))


def test_gaussians_requires_nonnegative_count():
    rng = Rng(0)
    assert rng.uniforms(0).size == 0
    with pytest.raises(ValueError):
        rng.uniforms(-1)
