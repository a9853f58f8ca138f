"""Similar-triangles accelerated gradient method (Q = R^n)."""

from __future__ import annotations

import math

import numpy as np

from ..errors import DivergenceError
from ..trace import Recorder, RunBudget, RunTrace
from ._common import constants, node_streams, start_point, stc_coefficient

__all__ = ["accelerated_gradient", "stm_certificate"]


def stm_certificate(L, R, N):
    """Upper bound ``4 L R^2 / (N + 1)^2`` on the deterministic gap after N steps."""
    return 4.0 * L * R**2 / (N + 1) ** 2


def accelerated_gradient(
    problem,
    x0=None,
    L: float | None = None,
    mu: float | None = None,
    budget: RunBudget | None = None,
    batch: int | None = None,
    seed: int = 0,
    distributed: bool | None = None,
    record=None,
    timing: bool = False,
) -> RunTrace:
    """Similar-triangles method with the mu-coupling.

    Each iteration queries one gradient at the extrapolated point ``y``.
    Without ``batch`` the exact gradient of every node is used; with
    ``batch = B`` every node returns the mean of B stochastic gradients.
    When ``distributed`` (default: more than one node) each iteration costs
    one communication round in which every node uploads n numbers.
    """
    budget = budget or RunBudget(max_iterations=1000)
    L, mu = constants(problem, L, mu)
    x = start_point(problem, x0)
    u = x.copy()
    A = 0.0
    m, n = problem.m, problem.n
    distributed = m > 1 if distributed is None else distributed
    rngs = node_streams(seed, "grad", m) if batch else None
    trace = RunTrace(
        "accelerated",
        meta={"L": L, "mu": mu, "batch": batch, "seed": seed, "distributed": distributed},
    )
    rec = Recorder(trace, problem, every=record, timing=timing)
    gap = problem.suboptimality(x)
    rec(0, gap)
    k = 0
    while not budget.reached(gap) and not budget.spent(k, problem.ledger):
        a = stc_coefficient(L, mu, A)
        A_new = A + a
        y = (a * u + A * x) / A_new
        if batch:
            g = np.mean([problem.batch_gradient(y, i, batch, rngs[i]) for i in range(m)], axis=0)
        else:
            g = problem.full_gradient(y)
        if distributed:
            problem.ledger.communicate(1, m * n)
        u = (u * (1.0 + mu * A) + a * (mu * y - g)) / (1.0 + mu * A_new)
        x = (a * u + A * x) / A_new
        A = A_new
        k += 1
        if not np.all(np.isfinite(x)):
            raise DivergenceError("non-finite iterate", trace=trace)
        gap = problem.suboptimality(x)
        if not math.isfinite(gap):
            raise DivergenceError("non-finite suboptimality", trace=trace)
        rec(k, gap)
    trace.x = x
    trace.meta["A"] = A
    return rec.close()
