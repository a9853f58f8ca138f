import itertools
import math

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from distopt.compressors import Compressor, compress, message_cost, rand_k, simplex_vertex, top_k
from distopt.errors import ConfigurationError
from distopt.rng import stream


def test_top_k_example():
    z = np.array([3.0, -1.0, 2.0])
    q = top_k(z, 2)
    np.testing.assert_array_equal(q, [3.0, 0.0, 2.0])
    err = np.sum((q - z) ** 2)
    assert err == 1.0
    assert err <= (1 - 2 / 3) * 14


def test_top_k_identity_and_ties():
    z = np.array([0.5, -2.0, 1.0])
    np.testing.assert_array_equal(top_k(z, 3), z)
    np.testing.assert_array_equal(top_k(np.array([1.0, -1.0, 0.0]), 1), [1.0, 0.0, 0.0])
    np.testing.assert_array_equal(top_k(np.array([-1.0, 1.0, 0.0]), 1), [-1.0, 0.0, 0.0])
    with pytest.raises(ConfigurationError):
        top_k(z, 4)
    with pytest.raises(ConfigurationError):
        top_k(z, 0)


def test_top_k_contraction_many_vectors():
    rng = stream(0, "topk")
    for _ in range(10_000):
        n = int(rng.integers(2, 257))
        k = int(rng.integers(1, n + 1))
        z = rng.standard_normal(n)
        q = top_k(z, k)
        zz = z @ z
        assert np.sum((q - z) ** 2) <= (1 - k / n) * zz * (1 + 1e-12)
        assert q @ q <= zz


def _enumerate_randk(z, k, scaled):
    n = z.size
    outs = []
    for subset in itertools.combinations(range(n), k):
        q = np.zeros(n)
        idx = list(subset)
        q[idx] = z[idx] * (n / k if scaled else 1.0)
        outs.append(q)
    return np.array(outs)


def test_rand_k_two_dim_scaled_enumeration():
    z = np.ones(2)
    outs = _enumerate_randk(z, 1, True)
    assert {tuple(o) for o in outs} == {(2.0, 0.0), (0.0, 2.0)}
    np.testing.assert_allclose(outs.mean(axis=0), z)
    assert np.mean(np.sum((outs - z) ** 2, axis=1)) == 2.0 == (2 / 1 - 1) * 2
    seen = {tuple(rand_k(z, 1, stream(s, "rk"), scaled=True)) for s in range(50)}
    assert seen == {(2.0, 0.0), (0.0, 2.0)}


def test_rand_k_two_dim_unscaled_enumeration():
    z = np.ones(2)
    outs = _enumerate_randk(z, 1, False)
    assert np.mean(np.sum((outs - z) ** 2, axis=1)) == 1.0 == (1 - 1 / 2) * 2
    seen = {tuple(rand_k(z, 1, stream(s, "rk"), scaled=False)) for s in range(50)}
    assert seen == {(1.0, 0.0), (0.0, 1.0)}


@pytest.mark.parametrize("scaled", [True, False])
def test_rand_k_full_is_identity(scaled):
    z = np.array([1.0, -2.0, 3.0])
    np.testing.assert_array_equal(rand_k(z, 3, np.random.default_rng(0), scaled), z)
    with pytest.raises(ConfigurationError):
        rand_k(z, 4, np.random.default_rng(0), scaled)


@pytest.mark.parametrize("n", range(2, 7))
def test_rand_k_variance_identities_by_enumeration(n):
    z = stream(n, "enum").standard_normal(n)
    zz = z @ z
    for k in range(1, n + 1):
        scaled = _enumerate_randk(z, k, True)
        np.testing.assert_allclose(scaled.mean(axis=0), z, atol=1e-14)
        assert np.mean(np.sum((scaled - z) ** 2, axis=1)) == pytest.approx((n / k - 1) * zz, abs=1e-12)
        plain = _enumerate_randk(z, k, False)
        assert np.mean(np.sum((plain - z) ** 2, axis=1)) == pytest.approx((1 - k / n) * zz, abs=1e-12)


def test_rand_k_scaled_monte_carlo():
    n, k, draws = 8, 3, 100_000
    z = stream(1, "z").standard_normal(n)
    rng = stream(1, "mc")
    Q = np.array([rand_k(z, k, rng) for _ in range(draws)])
    se = Q.std(axis=0) / math.sqrt(draws)
    assert np.all(np.abs(Q.mean(axis=0) - z) <= 4 * se)
    var = np.mean(np.sum((Q - z) ** 2, axis=1))
    assert abs(var / ((n / k - 1) * (z @ z)) - 1) < 0.02


def test_rand_k_scaled_can_exceed_norm():
    # the unbiased operator is not a contraction; this must stay that way
    z = np.ones(4)
    q = rand_k(z, 1, np.random.default_rng(0), scaled=True)
    assert q @ q > z @ z


def test_simplex_vertex_deterministic_vertex():
    rng = np.random.default_rng(0)
    for _ in range(20):
        np.testing.assert_array_equal(simplex_vertex([0.0, 1.0, 0.0], rng), [0.0, 1.0, 0.0])


def test_simplex_vertex_frequency_and_error():
    p = np.array([0.3, 0.7])
    rng = stream(2, "sv")
    idx = np.array([simplex_vertex(p, rng, one_hot=False) for _ in range(100_000)])
    assert abs(np.mean(idx == 0) - 0.3) <= 0.005
    # E|e_I - p|^2 = sum_i p_i |e_i - p|^2 = 1 - |p|^2
    exact = sum(p[i] * np.sum((np.eye(2)[i] - p) ** 2) for i in range(2))
    assert exact == pytest.approx(1 - p @ p, abs=1e-15)
    mc = np.mean(np.sum((np.eye(2)[idx] - p) ** 2, axis=1))
    assert abs(mc - exact) < 0.01


def test_simplex_vertex_validation():
    rng = np.random.default_rng(0)
    with pytest.raises(ConfigurationError):
        simplex_vertex([-0.1, 1.1], rng)
    with pytest.raises(ConfigurationError):
        simplex_vertex([0.2, 0.2], rng)
    # tiny rounding is renormalized
    assert simplex_vertex([0.5, 0.5 + 1e-12], rng).sum() == 1.0


def test_message_cost():
    assert message_cost(Compressor("identity"), 10) == 10
    assert message_cost(Compressor("topk", 3), 10) == 6
    assert message_cost(Compressor("randk_scaled", 3), 10) == 6
    assert message_cost(Compressor("simplex_vertex"), 10) == 1


def test_compressor_object():
    with pytest.raises(ConfigurationError):
        Compressor("gzip")
    with pytest.raises(ConfigurationError):
        Compressor("topk")
    assert Compressor("identity").q(5) == 1.0
    assert Compressor("topk", 2).q(8) == 0.25
    assert Compressor("randk_scaled", 2).omega(8) == 3.0
    assert not Compressor("topk", 2).unbiased
    with pytest.raises(ConfigurationError):
        Compressor("randk_plain", 2).omega(8)
    z = np.arange(4.0)
    assert compress(Compressor("identity"), z) is not None
    np.testing.assert_array_equal(Compressor("topk", 1)(z), [0, 0, 0, 3.0])


def test_signed_vertex_compression_is_unbiased():
    z = np.array([1.0, -2.0, 0.5])
    comp = Compressor("simplex_vertex")
    outs = {}
    # enumerate the outcomes: index i with probability |z_i|/|z|_1
    norm1 = np.abs(z).sum()
    mean = sum((abs(z[i]) / norm1) * norm1 * np.sign(z[i]) * np.eye(3)[i] for i in range(3))
    np.testing.assert_allclose(mean, z, atol=1e-15)
    rng = stream(3, "sv")
    for _ in range(2000):
        q = comp(z, rng)
        assert np.count_nonzero(q) == 1
        outs[tuple(q)] = True
    assert len(outs) == 3


@given(st.integers(1, 64), st.data())
def test_top_k_properties(n, data):
    k = data.draw(st.integers(1, n))
    z = np.array(data.draw(st.lists(st.floats(-1e6, 1e6), min_size=n, max_size=n)))
    q = top_k(z, k)
    assert np.count_nonzero(q) <= k
    assert q @ q <= z @ z
    assert np.sum((q - z) ** 2) <= (1 - k / n) * (z @ z) * (1 + 1e-12) + 1e-300
    # kept entries are copied, not rescaled
    kept = q != 0
    np.testing.assert_array_equal(q[kept], z[kept])
