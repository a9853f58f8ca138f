"""Local SGD (federated averaging) on identical node objectives."""

from __future__ import annotations

import math

import numpy as np

from ..errors import ConfigurationError, DivergenceError
from ..objectives import GaussianNoise
from ..trace import Recorder, RunTrace, StepSchedule
from ._common import constants, node_streams, start_point

__all__ = ["local_sgd", "local_sgd_step"]


def local_sgd_step(L: float, R: float, sigma2: float, m: int, K: int, T: int) -> StepSchedule:
    """Fixed-horizon step ``min{1/L, R sqrt(m) / (sigma sqrt(K T))}``."""
    return StepSchedule("fixed_horizon", L=L, R=R, M=math.sqrt(sigma2 / m), horizon=K * T)


def _identical(problem):
    if problem.is_quadratic:
        A, b = problem._node_A, problem._node_b
        return bool(np.all(A == A[0]) and np.all(b == b[0]))
    first = problem.components[0]
    return all(row is first or row == first for row in problem.components)


def local_sgd(
    problem,
    x0=None,
    K: int = 10,
    T: int = 10,
    step: StepSchedule | None = None,
    seed: int = 0,
    record=None,
    timing: bool = False,
    fast: bool = True,
) -> RunTrace:
    """K communication rounds, each preceded by T local SGD steps per node.

    Rounds average the node models exactly (one round, m n numbers).  The
    returned iterate is the uniform average of the mean model over all
    ``K T`` local steps; every node can keep its own running average, so it
    is recovered by the final averaging round.  The default step is
    :func:`local_sgd_step` with ``R = |x0 - x*|``.  Records are taken after
    each communication round and hold the gap of the running average.
    """
    if K < 0 or T < 1:
        raise ConfigurationError("need K >= 0 and T >= 1")
    if not _identical(problem):
        raise ConfigurationError("local_sgd expects identical node objectives")
    if problem.noise is None:
        raise ConfigurationError("local_sgd needs a stochastic oracle")
    m, n = problem.m, problem.n
    x = start_point(problem, x0)
    if step is None:
        L, _ = constants(problem)
        R = float(np.linalg.norm(x - problem.x_star)) or 1.0
        step = local_sgd_step(L, R, problem.noise_variance(), m, max(K, 1), T)
    grads = node_streams(seed, "grad", m)
    trace = RunTrace("local_sgd", meta={"K": K, "T": T, "m": m, "seed": seed, "step": step.to_dict()})
    rec = Recorder(trace, problem, every=record, timing=timing)
    rec(0, problem.suboptimality(x), 0.0)
    vectorized = fast and problem.is_quadratic and isinstance(problem.noise, GaussianNoise)
    if vectorized:
        H = problem._node_A[0] + problem.reg_coef * np.eye(n)
        b = problem._node_b[0] + problem.reg_coef * problem.reg_center
        sd = math.sqrt(problem.noise.sigma2 / n)
    total = np.zeros(n)
    t = 0
    for r in range(1, K + 1):
        X = np.tile(x, (m, 1))
        if vectorized:
            # one (T, n) block per node consumes each stream like T single draws
            noise = np.stack([g.normal(0.0, sd, (T, n)) for g in grads], axis=1) if sd > 0 else None
            for s in range(T):
                G = X @ H - b
                if noise is not None:
                    G += noise[s]
                X = X - step(t) * G
                total += X.mean(axis=0)
                t += 1
            problem.ledger.charge("stochastic", None, T)
        else:
            for _ in range(T):
                X = X - step(t) * problem.stochastic_gradients(X, grads)
                total += X.mean(axis=0)
                t += 1
        x = X.mean(axis=0)
        problem.ledger.communicate(1, m * n)
        if not np.all(np.isfinite(x)):
            raise DivergenceError("non-finite iterate", trace=trace)
        avg = total / t
        rec(r, lambda z=avg: problem.suboptimality(z), 0.0)
    trace.x = total / t if t else x
    return rec.close()
