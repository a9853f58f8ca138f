"""Star-topology SGD with compressed uplink messages."""

from __future__ import annotations

import numpy as np

from ..compressors import Compressor, compress, message_cost
from ..errors import ConfigurationError, DivergenceError, UnsupportedCombination
from ..trace import Recorder, RunBudget, RunTrace, StepSchedule
from ._common import DivergenceGuard, node_streams, start_point

__all__ = ["compressed_distributed_sgd"]


def compressed_distributed_sgd(
    problem,
    compressor: Compressor,
    x0=None,
    step: StepSchedule | None = None,
    budget: RunBudget | None = None,
    seed: int = 0,
    topology: str = "star",
    record=None,
    timing: bool = False,
) -> RunTrace:
    """Workers send compressed stochastic gradients, the server averages them.

    The step is divided by ``1 + omega`` to absorb the variance the
    compressor adds.  Each round costs one communication round and
    ``m * message_cost`` transmitted numbers.  With the identity compressor
    the run coincides with :func:`sgd` at the same seed.
    """
    if topology not in ("star", "complete"):
        raise ConfigurationError("compressed SGD runs on a star or complete topology")
    if not compressor.unbiased:
        raise UnsupportedCombination(f"{compressor.kind} is biased; error feedback is not implemented")
    m, n = problem.m, problem.n
    step = step or StepSchedule("constant", h=1.0)
    budget = budget or RunBudget(max_iterations=1000)
    omega = compressor.omega(n)
    cost = message_cost(compressor, n)
    grads = node_streams(seed, "grad", m)
    crngs = node_streams(seed, "compress", m)
    x = start_point(problem, x0)
    trace = RunTrace(
        "compressed_distributed_sgd",
        meta={"compressor": compressor.kind, "k": compressor.k, "omega": omega, "topology": topology,
              "seed": seed, "step": step.to_dict()},
    )
    rec = Recorder(trace, problem, every=record, timing=timing)
    gap = problem.suboptimality(x)
    guard = DivergenceGuard(gap)
    rec(0, gap)
    k = 0
    while not budget.reached(gap) and not budget.spent(k, problem.ledger):
        G = problem.stochastic_gradients(np.tile(x, (m, 1)), grads)
        if compressor.kind != "identity":
            G = np.array([compress(compressor, G[i], crngs[i]) for i in range(m)])
        g = np.mean(G, axis=0)
        h = step(k) if omega == 0 else step(k) / (1.0 + omega)
        x = x - h * g
        problem.ledger.communicate(1, m * cost)
        k += 1
        if not np.all(np.isfinite(x)):
            raise DivergenceError("non-finite iterate", trace=trace)
        gap = problem.suboptimality(x)
        guard.check(gap, trace)
        rec(k, gap)
    trace.x = x
    return rec.close()
