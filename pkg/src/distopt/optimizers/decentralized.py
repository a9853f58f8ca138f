"""Decentralized methods over a gossip schedule.

Node ``k`` holds row ``k`` of a node matrix.  The objective value is
tracked at the row mean; the consensus error is tracked alongside.
"""

from __future__ import annotations

import math

import numpy as np

from ..compressors import Compressor, compress, message_cost
from ..consensus import chebyshev_consensus, chebyshev_depth, consensus_error, gossip_round, plain_depth
from ..errors import ConfigurationError, DivergenceError, UnsupportedCombination
from ..topology import GossipMatrix, Schedule
from ..trace import Recorder, RunBudget, RunTrace, StepSchedule
from ._common import DivergenceGuard, constants, node_streams, start_point, stc_coefficient

__all__ = ["decentralized_sgd", "decentralized_accelerated"]


def _as_schedule(schedule, m):
    if isinstance(schedule, GossipMatrix):
        schedule = Schedule("static", (schedule,))
    if not isinstance(schedule, Schedule):
        raise ConfigurationError("expected a Schedule or GossipMatrix")
    if schedule.m != m:
        raise ConfigurationError(f"schedule has {schedule.m} nodes, problem has {m}")
    return schedule


def decentralized_sgd(
    problem,
    schedule,
    x0=None,
    step: StepSchedule | None = None,
    budget: RunBudget | None = None,
    local_steps: int = 1,
    compressor: Compressor | None = None,
    seed: int = 0,
    consensus_step: float | None = None,
    record=None,
    timing: bool = False,
) -> RunTrace:
    """Local stochastic steps alternating with one gossip round.

    Each round every node takes ``local_steps`` steps on its own f_k, then
    the nodes gossip once with ``schedule(round)``.  Without a compressor
    (or with the identity) the gossip is ``X <- W X``.  With an unbiased
    compressor the nodes exchange compressed differences to public copies
    ``Xh`` of their models: ``Xh += Q(X - Xh) / (1 + omega)`` and
    ``X += consensus_step (W - I) Xh``, with ``consensus_step`` defaulting
    to ``1 / (1 + omega)``.  Problems without a noise model use exact
    node gradients.
    """
    m, n = problem.m, problem.n
    schedule = _as_schedule(schedule, m)
    step = step or StepSchedule("constant", h=1.0 / constants(problem)[0])
    budget = budget or RunBudget(max_iterations=1000)
    if local_steps < 1:
        raise ConfigurationError("local_steps must be >= 1")
    comp = compressor if compressor is not None and compressor.kind != "identity" else None
    if comp is not None and not comp.unbiased:
        raise UnsupportedCombination(f"{comp.kind} is biased; error feedback is not implemented")
    omega = comp.omega(n) if comp is not None else 0.0
    gamma = consensus_step if consensus_step is not None else 1.0 / (1.0 + omega)
    grads = node_streams(seed, "grad", m)
    crngs = node_streams(seed, "compress", m) if comp is not None else None
    X = np.tile(start_point(problem, x0), (m, 1))
    Xh = np.zeros_like(X) if comp is not None else None
    trace = RunTrace(
        "decentralized_sgd",
        meta={"local_steps": local_steps, "schedule": schedule.kind, "chi": schedule.chi, "seed": seed,
              "compressor": None if comp is None else comp.kind, "step": step.to_dict()},
    )
    rec = Recorder(trace, problem, every=record, timing=timing)
    gap = problem.suboptimality(X.mean(axis=0))
    guard = DivergenceGuard(gap)
    rec(0, gap, 0.0)
    t = 0
    r = 0
    while not budget.reached(gap) and not budget.spent(r, problem.ledger):
        for _ in range(local_steps):
            G = problem.full_gradients(X) if problem.noise is None else problem.stochastic_gradients(X, grads)
            X = X - step(t) * G
            t += 1
        W = schedule(r)
        if comp is None:
            X = gossip_round(W, X, problem.ledger)
        else:
            D = X - Xh
            Q = np.array([compress(comp, D[k], crngs[k]) for k in range(m)])
            Xh = Xh + Q / (1.0 + omega)
            X = X + gamma * (W.W @ Xh - Xh)
            problem.ledger.communicate(1, 2 * W.edges * message_cost(comp, n))
        r += 1
        if not np.all(np.isfinite(X)):
            raise DivergenceError("non-finite iterate", trace=trace)
        gap = problem.suboptimality(X.mean(axis=0))
        guard.check(gap, trace)
        rec(r, gap, consensus_error(X))
    trace.x = X.mean(axis=0)
    trace.meta["nodes"] = X
    return rec.close()


def decentralized_accelerated(
    problem,
    schedule,
    x0=None,
    eps: float = 1e-6,
    budget: RunBudget | None = None,
    L: float | None = None,
    mu: float | None = None,
    delta: float | None = None,
    batch: int | None = None,
    seed: int = 0,
    record=None,
    timing: bool = False,
) -> RunTrace:
    """Similar-triangles method with multi-step consensus after every gradient step.

    Every node runs the accelerated recursion on its own f_k; after the
    dual-vector update the nodes average ``U`` with a Chebyshev polynomial
    of depth :func:`chebyshev_depth` ``(chi, delta)``.  A time-varying
    schedule falls back to plain gossip of depth :func:`plain_depth`, so the
    round count then scales with chi rather than sqrt(chi).  ``delta``
    defaults to ``eps``; the run stops once the mean iterate is ``eps``-optimal
    or the budget is spent.
    """
    m, n = problem.m, problem.n
    schedule = _as_schedule(schedule, m)
    L, mu = constants(problem, L, mu)
    if mu <= 0:
        raise ConfigurationError("decentralized_accelerated needs mu > 0")
    delta = eps if delta is None else delta
    chi = schedule.chi
    if schedule.is_static:
        depth = chebyshev_depth(chi, delta)
        gm = schedule.static_matrix
    else:
        depth = plain_depth(chi, delta)
    budget = budget or RunBudget(target_eps=eps, max_iterations=100_000)
    if budget.target_eps is None:
        budget = RunBudget(budget.max_iterations, budget.max_rounds, budget.max_oracle_calls, eps)
    grads = node_streams(seed, "grad", m) if batch else None
    X = np.tile(start_point(problem, x0), (m, 1))
    U = X.copy()
    A = 0.0
    trace = RunTrace(
        "decentralized_accelerated",
        meta={"L": L, "mu": mu, "chi": chi, "depth": depth, "delta": delta, "eps": eps,
              "consensus": "chebyshev" if schedule.is_static else "plain", "seed": seed},
    )
    rec = Recorder(trace, problem, every=record, timing=timing)
    gap = problem.suboptimality(X.mean(axis=0))
    rec(0, gap, 0.0)
    k = 0
    gossip_t = 0
    while not budget.reached(gap) and not budget.spent(k, problem.ledger):
        a = stc_coefficient(L, mu, A)
        A_new = A + a
        Y = (a * U + A * X) / A_new
        if batch:
            G = np.array([problem.batch_gradient(Y[i], i, batch, grads[i]) for i in range(m)])
        else:
            G = problem.full_gradients(Y)
        U = (U * (1.0 + mu * A) + a * (mu * Y - G)) / (1.0 + mu * A_new)
        if schedule.is_static:
            U = chebyshev_consensus(gm, U, depth, problem.ledger)
        else:
            for _ in range(depth):
                U = gossip_round(schedule(gossip_t), U, problem.ledger)
                gossip_t += 1
        X = (a * U + A * X) / A_new
        A = A_new
        k += 1
        if not np.all(np.isfinite(X)):
            raise DivergenceError("non-finite iterate", trace=trace)
        gap = problem.suboptimality(X.mean(axis=0))
        if not math.isfinite(gap):
            raise DivergenceError("non-finite suboptimality", trace=trace)
        rec(k, gap, consensus_error(X))
    trace.x = X.mean(axis=0)
    return rec.close()
