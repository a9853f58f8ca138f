"""Stochastic gradient descent with iterate averaging."""

from __future__ import annotations

import numpy as np

from .. import kernels
from ..errors import ConfigurationError
from ..objectives import GaussianNoise
from ..trace import Recorder, RunBudget, RunTrace, StepSchedule
from ._common import DivergenceGuard, node_streams, start_point

__all__ = ["sgd"]

_CHUNK = 1 << 15


def _averaging(schedule, averaging):
    if averaging is None:
        return "last" if schedule.kind == "inverse_mu" else "suffix"
    if averaging not in ("last", "suffix"):
        raise ConfigurationError(f"unknown averaging {averaging!r}")
    return averaging


def sgd(
    problem,
    x0=None,
    schedule: StepSchedule | None = None,
    budget: RunBudget | None = None,
    seed: int = 0,
    averaging: str | None = None,
    record=None,
    timing: bool = False,
    fast: bool = True,
) -> RunTrace:
    """Plain SGD ``x <- x - h_k g(x, xi)`` on the global objective.

    With several nodes each call averages one sample per node.  The
    reported iterate is the last one for ``inverse_mu`` schedules and the
    average over the last half of the iterates otherwise (override with
    ``averaging``).  Single-node quadratics with Gaussian noise and a pure
    iteration budget run through the compiled loop when ``fast`` is set.
    """
    schedule = schedule or StepSchedule("constant", h=1.0)
    budget = budget or RunBudget(max_iterations=1000)
    mode = _averaging(schedule, averaging)
    x = start_point(problem, x0)
    trace = RunTrace("sgd", meta={"schedule": schedule.to_dict(), "averaging": mode, "seed": seed})
    rec = Recorder(trace, problem, every=record, timing=timing)
    gap0 = problem.suboptimality(x)
    guard = DivergenceGuard(gap0)
    rec(0, gap0)
    use_kernel = (
        fast
        and problem.m == 1
        and problem.is_quadratic
        and isinstance(problem.noise, GaussianNoise)
        and budget.max_iterations is not None
        and budget.max_rounds is None
        and budget.max_oracle_calls is None
        and budget.target_eps is None
    )
    if use_kernel:
        out = _run_kernel(problem, x, schedule, budget.max_iterations, seed, mode, rec, guard, trace)
    else:
        out = _run_python(problem, x, schedule, budget, seed, mode, rec, guard, trace)
    trace.x = out
    return rec.close()


def _run_python(problem, x, schedule, budget, seed, mode, rec, guard, trace):
    rngs = node_streams(seed, "grad", problem.m)
    iterates = [x.copy()] if mode == "suffix" else None
    prefix = np.zeros_like(x)
    sums = [prefix.copy()]
    k = 0
    out = x
    while not budget.spent(k, problem.ledger):
        g = problem.stochastic_gradient(x, None, rngs)
        x = x - schedule(k) * g
        k += 1
        prefix = prefix + x
        if mode == "suffix":
            sums.append(prefix.copy())
            a = k // 2
            out = (prefix - sums[a]) / (k - a)
        else:
            out = x
        if rec.wants(k) or budget.target_eps is not None:
            gap = problem.suboptimality(out)
            guard.check(gap, trace)
            rec(k, gap)
            if budget.reached(gap):
                break
        else:
            rec(k, lambda out=out: problem.suboptimality(out))
    return out


def _run_kernel(problem, x, schedule, N, seed, mode, rec, guard, trace):
    n = problem.n
    H = np.ascontiguousarray(problem._node_A[0] + problem.reg_coef * np.eye(n))
    b = np.ascontiguousarray(problem._node_b[0] + problem.reg_coef * problem.reg_center)
    sigma2 = problem.noise.sigma2
    rng = node_streams(seed, "grad", 1)[0]
    wanted = sorted({k for k in range(1, N + 1) if rec.wants(k)} | {N}) if N > 0 else []
    # prefix sums are also needed at the start of each averaging window
    halves = {k // 2 for k in wanted if mode == "suffix"} - {0}
    marks = np.array(sorted(set(wanted) | halves), dtype=np.int64)
    state_x = x.copy()
    state_s = np.zeros(n)
    saved_x, saved_s = {}, {}
    sd = np.sqrt(sigma2 / n)
    for lo in range(0, N, _CHUNK):
        hi = min(lo + _CHUNK, N)
        steps = np.ascontiguousarray(schedule.steps(hi)[lo:hi])
        noise = rng.normal(0.0, sd, (hi - lo, n)) if sigma2 > 0 else np.empty((0, n))
        local = marks[(marks > lo) & (marks <= hi)]
        ox, os_ = kernels.quad_sgd(H, b, state_x, state_s, steps, noise, (local - lo - 1).astype(np.int64))
        for i, k in enumerate(local):
            saved_x[int(k)] = ox[i]
            saved_s[int(k)] = os_[i]
    out = x
    done = 0
    for k in wanted:
        problem.ledger.charge("stochastic", 0, k - done)
        done = k
        if mode == "suffix":
            a = k // 2
            base = saved_s[a] if a > 0 else 0.0
            out = (saved_s[k] - base) / (k - a)
        else:
            out = saved_x[k]
        gap = problem.suboptimality(out)
        guard.check(gap, trace)
        rec(k, gap, force=True)
    return out
