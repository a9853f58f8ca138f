"""Helpers shared by the optimizer implementations."""

from __future__ import annotations

import math

import numpy as np

from ..errors import ConfigurationError, DivergenceError
from ..rng import stream

DIVERGENCE_FACTOR = 1e3


def start_point(problem, x0):
    if x0 is None:
        return np.zeros(problem.n)
    x0 = np.asarray(x0, dtype=float)
    if x0.shape != (problem.n,):
        raise ConfigurationError(f"x0 must have dimension {problem.n}")
    return x0.copy()


def node_streams(seed, purpose, m):
    return [stream(seed, purpose, k) for k in range(m)]


def constants(problem, L=None, mu=None):
    """Worst node smoothness and global strong convexity unless given."""
    if L is None:
        L = float(problem.node_constants()[0].max())
    if mu is None:
        mu = problem.global_mu()
    if L <= 0 or mu < 0 or mu > L:
        raise ConfigurationError(f"invalid constants L={L}, mu={mu}")
    return L, mu


class DivergenceGuard:
    """Flags a run whose suboptimality grows past ``factor`` times the initial gap."""

    def __init__(self, initial_gap, factor=DIVERGENCE_FACTOR):
        self.limit = factor * max(initial_gap, 1e-12)

    def check(self, subopt, trace):
        if not math.isfinite(subopt) or subopt > self.limit:
            raise DivergenceError(f"suboptimality {subopt:.3e} exceeds {self.limit:.3e}", trace=trace)


def stc_coefficient(L, mu, A):
    """Step weight a solving ``L a^2 = (A + a)(1 + mu A)``."""
    c = 1.0 + mu * A
    return (c + math.sqrt(c * c + 4.0 * L * A * c)) / (2.0 * L)
