import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from distopt.errors import ConfigurationError, TopologyError
from distopt.topology import (
    Graph,
    chi,
    gossip_matrix,
    laplacian,
    laplacian_spectrum,
    make_graph,
    periodic_schedule,
    random_schedule,
    static_schedule,
)

FAMILIES = ("path", "ring", "star", "complete")


def ring_chi(m):
    # Laplacian spectrum of the cycle: 2 - 2 cos(2 pi k / m)
    lam = 2 - 2 * np.cos(2 * np.pi * np.arange(m) / m)
    return lam.max() / np.sort(lam)[1]


def path_chi(m):
    # Laplacian spectrum of the path: 2 - 2 cos(pi k / m)
    lam = 2 - 2 * np.cos(np.pi * np.arange(m) / m)
    return lam.max() / np.sort(lam)[1]


def test_edge_counts_and_diameter():
    assert len(make_graph("complete", 3).edges) == 3
    path = make_graph("path", 4)
    assert len(path.edges) == 3
    assert path.diameter == 3


def test_erdos_renyi_connected_and_reproducible():
    a = make_graph("erdos_renyi", 10, p=0.5, seed=7)
    b = make_graph("erdos_renyi", 10, p=0.5, seed=7)
    assert a.is_connected()
    assert a.edges == b.edges
    assert make_graph("erdos_renyi", 10, p=0.5, seed=8).edges != a.edges


def test_erdos_renyi_unachievable_raises():
    with pytest.raises(TopologyError):
        make_graph("erdos_renyi", 40, p=1e-4, seed=1)


def test_graph_validation():
    with pytest.raises(ConfigurationError):
        make_graph("ring", 1)
    with pytest.raises(ConfigurationError):
        Graph(3, frozenset({(0, 0), (0, 1), (1, 2)}))
    with pytest.raises(ConfigurationError):
        make_graph("hypercube", 4)
    with pytest.raises(TopologyError):
        Graph(4, frozenset({(0, 1), (2, 3)}))


def test_laplacian_small_cases():
    np.testing.assert_array_equal(laplacian(make_graph("path", 2)), [[1, -1], [-1, 1]])
    np.testing.assert_array_equal(laplacian(make_graph("complete", 3)), 3 * np.eye(3) - np.ones((3, 3)))


@pytest.mark.parametrize("seed", range(5))
def test_laplacian_row_sums_zero_random(seed):
    g = make_graph("erdos_renyi", 15, p=0.3, seed=seed)
    Lap = laplacian(g)
    assert Lap.dtype.kind == "i"
    assert np.all(Lap.sum(axis=1) == 0)
    assert laplacian_spectrum(g)[0] > -1e-12


def test_chi_closed_forms():
    assert chi(make_graph("complete", 7)) == pytest.approx(1.0, rel=1e-12)
    assert chi(make_graph("star", 4)) == pytest.approx(4.0, rel=1e-12)
    assert chi(make_graph("ring", 4)) == pytest.approx(2.0, rel=1e-12)


@pytest.mark.parametrize("m", [5, 8, 16, 33, 64])
def test_chi_ring_and_path_against_cosine_spectrum(m):
    assert chi(make_graph("ring", m)) == pytest.approx(ring_chi(m), rel=1e-9)
    assert chi(make_graph("path", m)) == pytest.approx(path_chi(m), rel=1e-9)


@pytest.mark.parametrize("m", [3, 10, 50])
def test_chi_star_equals_m(m):
    assert chi(make_graph("star", m)) == pytest.approx(m, rel=1e-10)


def test_chi_ring_increases_with_m():
    vals = [chi(make_graph("ring", m)) for m in (4, 8, 16, 32, 64)]
    assert all(a < b for a, b in zip(vals, vals[1:]))


@pytest.mark.parametrize("kind", FAMILIES)
def test_zero_eigenvalue_separation(kind):
    # lambda_2 must sit far above the zero threshold up to m = 512
    for m in (2, 16, 128, 512):
        eig = laplacian_spectrum(make_graph(kind, m))
        assert abs(eig[0]) < 1e-9 * eig[-1]
        assert eig[1] >= 1e3 * 1e-9 * eig[-1]


def test_gossip_small_cases():
    np.testing.assert_allclose(gossip_matrix(make_graph("path", 2)).W, np.full((2, 2), 0.5), atol=1e-15)
    np.testing.assert_allclose(gossip_matrix(make_graph("complete", 3)).W, np.full((3, 3), 1 / 3), atol=1e-15)


def _check_gossip(gm):
    W = gm.W
    assert np.allclose(W, W.T, atol=0)
    assert np.abs(W.sum(axis=0) - 1).max() <= 1e-10
    assert np.abs(W.sum(axis=1) - 1).max() <= 1e-10
    eig = np.linalg.eigvalsh(W)
    assert eig[0] >= -1 - 1e-10 and eig[-1] <= 1 + 1e-10
    assert eig[-2] < 1 - 1e-9
    assert 1 - eig[-2] == pytest.approx(1 / gm.chi, rel=1e-8)


@pytest.mark.parametrize("kind", FAMILIES)
def test_gossip_invariants_families(kind):
    _check_gossip(gossip_matrix(make_graph(kind, 12)))


@given(st.integers(2, 30), st.floats(0.2, 1.0), st.integers(0, 10_000))
def test_gossip_invariants_random(m, p, seed):
    gm = gossip_matrix(make_graph("erdos_renyi", m, p=p, seed=seed))
    _check_gossip(gm)
    ones = np.ones(m)
    np.testing.assert_allclose(gm.W @ (3.7 * ones), 3.7 * ones, rtol=1e-13)


def test_static_schedule_constant():
    s = static_schedule(make_graph("ring", 6))
    assert s(0) is s(17)
    assert s.is_static
    assert s.chi == pytest.approx(chi(make_graph("ring", 6)))


def test_periodic_schedule_picks_by_index():
    ring, star = make_graph("ring", 5), make_graph("star", 5)
    s = periodic_schedule([ring, star])
    np.testing.assert_array_equal(s(3).W, gossip_matrix(star).W)
    np.testing.assert_array_equal(s(4).W, gossip_matrix(ring).W)
    assert s.chi == pytest.approx(max(chi(ring), chi(star)))
    assert not s.is_static


def test_random_schedule_reproducible():
    a = random_schedule(8, 0.4, seed=3)
    b = random_schedule(8, 0.4, seed=3)
    for t in (0, 5, 99, 1000):
        assert np.array_equal(a(t).W, b(t).W)
        _check_gossip(a(t))
    assert a.chi >= 1
    with pytest.raises(ConfigurationError):
        a(-1)
    with pytest.raises(ConfigurationError):
        a.static_matrix
