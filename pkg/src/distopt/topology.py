"""Communication graphs, Laplacians, gossip matrices and schedules."""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from functools import cached_property

import numpy as np
from scipy.sparse.csgraph import connected_components, shortest_path

from .errors import ConfigurationError, TopologyError
from .rng import stream

__all__ = [
    "Graph",
    "GossipMatrix",
    "Schedule",
    "make_graph",
    "laplacian",
    "laplacian_spectrum",
    "chi",
    "gossip_matrix",
    "static_schedule",
    "periodic_schedule",
    "random_schedule",
    "ZERO_EIG_RTOL",
]

# eigenvalues below ZERO_EIG_RTOL * lambda_max count as zero
ZERO_EIG_RTOL = 1e-9
ER_RETRIES = 1000


@dataclass(frozen=True)
class Graph:
    """Undirected simple graph on nodes ``0 .. m-1``."""

    m: int
    edges: frozenset
    name: str = "graph"

    def __post_init__(self):
        if self.m < 2:
            raise ConfigurationError("a graph needs at least two nodes")
        clean = set()
        for i, j in self.edges:
            if i == j:
                raise ConfigurationError(f"self-loop at node {i}")
            if not (0 <= i < self.m and 0 <= j < self.m):
                raise ConfigurationError(f"edge ({i}, {j}) out of range")
            edge = (min(i, j), max(i, j))
            if edge in clean:
                raise ConfigurationError(f"duplicate edge {edge}")
            clean.add(edge)
        object.__setattr__(self, "edges", frozenset(clean))
        if not self.is_connected():
            raise TopologyError(f"{self.name} on {self.m} nodes is disconnected")

    def adjacency(self) -> np.ndarray:
        A = np.zeros((self.m, self.m), dtype=np.int64)
        for i, j in self.edges:
            A[i, j] = A[j, i] = 1
        return A

    def is_connected(self) -> bool:
        return connected_components(self.adjacency(), directed=False)[0] == 1

    @property
    def diameter(self) -> int:
        dist = shortest_path(self.adjacency(), directed=False, unweighted=True)
        return int(dist.max())


def _edges_for(kind, m, p, rng):
    if kind == "path":
        return {(i, i + 1) for i in range(m - 1)}
    if kind == "ring":
        if m == 2:
            return {(0, 1)}
        return {(i, (i + 1) % m) for i in range(m)}
    if kind == "star":
        return {(0, i) for i in range(1, m)}
    if kind == "complete":
        return set(itertools.combinations(range(m), 2))
    if kind == "erdos_renyi":
        mask = rng.random(m * (m - 1) // 2) < p
        return {e for e, keep in zip(itertools.combinations(range(m), 2), mask) if keep}
    raise ConfigurationError(f"unknown graph kind {kind!r}")


def make_graph(kind: str, m: int, p: float | None = None, seed: int | None = None) -> Graph:
    """Build a connected graph of one of the standard families.

    Erdos-Renyi graphs are redrawn from the same seeded stream until one is
    connected; the attempt count is bounded by ``ER_RETRIES``.
    """
    if m < 2:
        raise ConfigurationError("need m >= 2")
    if kind != "erdos_renyi":
        return Graph(m, frozenset(_edges_for(kind, m, None, None)), name=f"{kind}({m})")
    if p is None or not 0 < p <= 1:
        raise ConfigurationError("erdos_renyi needs 0 < p <= 1")
    if seed is None:
        raise ConfigurationError("erdos_renyi needs a seed")
    rng = stream(seed, "erdos_renyi", m)
    for _ in range(ER_RETRIES):
        edges = _edges_for(kind, m, p, rng)
        try:
            return Graph(m, frozenset(edges), name=f"erdos_renyi({m}, {p})")
        except TopologyError:
            continue
    raise TopologyError(f"no connected G({m}, {p}) after {ER_RETRIES} draws")


def laplacian(graph: Graph) -> np.ndarray:
    """Integer Laplacian ``D - A``."""
    A = graph.adjacency()
    return np.diag(A.sum(axis=1)) - A


def laplacian_spectrum(graph: Graph) -> np.ndarray:
    return np.linalg.eigvalsh(laplacian(graph).astype(float))


def _extremes(graph):
    eig = laplacian_spectrum(graph)
    lam_max = eig[-1]
    positive = eig[eig > ZERO_EIG_RTOL * lam_max]
    # a connected graph has exactly one zero eigenvalue
    if positive.size != graph.m - 1:
        raise TopologyError(f"{graph.name}: algebraic connectivity below threshold")
    return float(lam_max), float(positive[0])


def chi(graph: Graph) -> float:
    """Ratio of the largest to the smallest positive Laplacian eigenvalue."""
    lam_max, lam_min = _extremes(graph)
    return lam_max / lam_min


@dataclass(frozen=True, eq=False)
class GossipMatrix:
    """``W = I - L / lambda_max(L)`` with the spectrum it was built from."""

    W: np.ndarray
    lambda_max: float
    lambda_min_pos: float
    edges: int

    @property
    def m(self) -> int:
        return self.W.shape[0]

    @property
    def chi(self) -> float:
        return self.lambda_max / self.lambda_min_pos

    @property
    def second_eigenvalue(self) -> float:
        """lambda_2(W) = 1 - 1/chi."""
        return 1.0 - self.lambda_min_pos / self.lambda_max

    @property
    def smallest_eigenvalue(self) -> float:
        return 0.0


def gossip_matrix(graph: Graph) -> GossipMatrix:
    lam_max, lam_min = _extremes(graph)
    Lap = laplacian(graph).astype(float)
    W = np.eye(graph.m) - Lap / lam_max
    return GossipMatrix(W, lam_max, lam_min, len(graph.edges))


@dataclass(frozen=True, eq=False)
class Schedule:
    """Round-indexed sequence of gossip matrices.

    ``kind`` is ``"static"``, ``"periodic"`` or ``"random"``.  Random
    schedules draw round ``t``'s graph from a seeded pool, so the matrix for
    a given round never depends on which other rounds were queried.
    """

    kind: str
    matrices: tuple
    seed: int | None = None
    _chi: float = field(init=False)

    def __post_init__(self):
        if not self.matrices:
            raise ConfigurationError("schedule needs at least one graph")
        sizes = {g.m for g in self.matrices}
        if len(sizes) != 1:
            raise ConfigurationError("all graphs in a schedule need the same node count")
        object.__setattr__(self, "_chi", max(g.chi for g in self.matrices))

    @property
    def m(self) -> int:
        return self.matrices[0].m

    @property
    def chi(self) -> float:
        """Worst chi over every graph the schedule can emit."""
        return self._chi

    @property
    def is_static(self) -> bool:
        return self.kind == "static"

    def __call__(self, t: int) -> GossipMatrix:
        if t < 0:
            raise ConfigurationError("round index must be non-negative")
        if self.kind == "static":
            return self.matrices[0]
        if self.kind == "periodic":
            return self.matrices[t % len(self.matrices)]
        idx = int(stream(self.seed, "schedule", t).integers(len(self.matrices)))
        return self.matrices[idx]

    @cached_property
    def static_matrix(self) -> GossipMatrix:
        if not self.is_static:
            raise ConfigurationError("schedule is time-varying")
        return self.matrices[0]


def static_schedule(graph: Graph) -> Schedule:
    return Schedule("static", (gossip_matrix(graph),))


def periodic_schedule(graphs) -> Schedule:
    return Schedule("periodic", tuple(gossip_matrix(g) for g in graphs))


def random_schedule(m: int, p: float, seed: int, pool: int = 8) -> Schedule:
    """Rounds draw uniformly from ``pool`` seeded connected Erdos-Renyi graphs."""
    graphs = [make_graph("erdos_renyi", m, p=p, seed=int(stream(seed, "pool", i).integers(2**31))) for i in range(pool)]
    return Schedule("random", tuple(gossip_matrix(g) for g in graphs), seed=seed)
