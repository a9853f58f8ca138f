"""Loopless accelerated variance reduction for finite sums."""

from __future__ import annotations

import math

import numpy as np

from ..errors import ConfigurationError, DivergenceError
from ..rng import stream
from ..trace import Recorder, RunBudget, RunTrace
from ._common import node_streams, start_point

__all__ = ["variance_reduced", "katyusha_parameters"]


def katyusha_parameters(L: float, mu: float, count: int) -> dict:
    """Momentum weights, step and anchor-refresh probability for ``count`` components."""
    if mu <= 0:
        raise ConfigurationError("variance reduction needs mu > 0; regularize the problem first")
    sigma = mu / L
    theta1 = min(math.sqrt(2.0 * sigma * count / 3.0), 0.5)
    theta2 = 0.5
    return {
        "theta1": theta1,
        "theta2": theta2,
        "eta": theta2 / ((1.0 + theta2) * theta1),
        "p": 1.0 / count,
        "sigma": sigma,
    }


def variance_reduced(
    problem,
    x0=None,
    budget: RunBudget | None = None,
    seed: int = 0,
    L: float | None = None,
    mu: float | None = None,
    anchor_batch: int | None = None,
    record=None,
    timing: bool = False,
) -> RunTrace:
    """Loopless Katyusha over the ``m r`` components of ``problem``.

    Every iteration samples one component uniformly and queries its
    gradient at the momentum point and at the anchor ``w``.  The anchor is
    moved to the previous ``y`` with probability ``1/(m r)`` and its full
    gradient is then rebuilt from all components.  With ``anchor_batch``
    the anchor gradient is instead a minibatch stochastic gradient of that
    size per node, which removes the noise term when sigma^2 > 0.

    ``L`` defaults to the largest component smoothness and ``mu`` to the
    strong convexity of the sum.  The trace tracks ``f(y_k) - f*``.
    """
    budget = budget or RunBudget(max_iterations=10_000)
    L = problem.component_L() if L is None else L
    mu = problem.global_mu() if mu is None else mu
    count = problem.m * problem.r
    par = katyusha_parameters(L, mu, count)
    th1, th2, eta, p, sig = par["theta1"], par["theta2"], par["eta"], par["p"], par["sigma"]
    rng = stream(seed, "vr")
    grads = node_streams(seed, "grad", problem.m) if anchor_batch else None
    m, r = problem.m, problem.r

    def anchor_gradient(w):
        if anchor_batch:
            return np.mean([problem.batch_gradient(w, k, anchor_batch, grads[k]) for k in range(m)], axis=0)
        total = np.zeros(problem.n)
        for k in range(m):
            for j in range(r):
                total += problem.component_gradient(w, k, j)
        return total / count

    x0 = start_point(problem, x0)
    y, z, w = x0.copy(), x0.copy(), x0.copy()
    gw = anchor_gradient(w)
    trace = RunTrace("variance_reduced", meta={**par, "L": L, "mu": mu, "components": count, "seed": seed})
    rec = Recorder(trace, problem, every=record, timing=timing)
    gap = problem.suboptimality(y)
    rec(0, gap)
    k = 0
    while not budget.reached(gap) and not budget.spent(k, problem.ledger):
        x = th1 * z + th2 * w + (1.0 - th1 - th2) * y
        i = int(rng.integers(count))
        node, j = divmod(i, r)
        g = gw + problem.component_gradient(x, node, j) - problem.component_gradient(w, node, j)
        z_new = (eta * sig * x + z - (eta / L) * g) / (1.0 + eta * sig)
        y_old = y
        y = x + th1 * (z_new - z)
        z = z_new
        if rng.random() < p:
            w = y_old
            gw = anchor_gradient(w)
        k += 1
        if not np.all(np.isfinite(y)):
            raise DivergenceError("non-finite iterate", trace=trace)
        gap = problem.suboptimality(y)
        if not math.isfinite(gap):
            raise DivergenceError("non-finite suboptimality", trace=trace)
        rec(k, gap)
    trace.x = y
    return rec.close()
