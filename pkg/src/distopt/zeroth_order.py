"""Gradient-free oracles: two-point estimates and the methods built on them."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import ConfigurationError, DivergenceError
from .optimizers._common import DivergenceGuard, node_streams, start_point
from .optimizers.sliding import run_sliding
from .trace import Recorder, RunBudget, RunTrace, StepSchedule

__all__ = ["SmoothingConfig", "sphere_direction", "two_point_estimate", "zo_sgd", "gradient_free_sliding"]


@dataclass(frozen=True)
class SmoothingConfig:
    """Smoothing radius ``tau`` and direction law (uniform on the unit sphere)."""

    tau: float = 1e-4
    direction_distribution: str = "sphere"

    def __post_init__(self):
        if not self.tau > 0:
            raise ConfigurationError("tau must be positive")
        if self.direction_distribution != "sphere":
            raise ConfigurationError("only uniform-on-sphere directions are supported")


def sphere_direction(n: int, rng) -> np.ndarray:
    """Uniform unit vector from a normalized Gaussian draw."""
    e = rng.standard_normal(n)
    return e / np.linalg.norm(e)


def two_point_estimate(oracle, x, config: SmoothingConfig, rng, e=None) -> np.ndarray:
    """``(n / 2 tau) (f(x + tau e, xi) - f(x - tau e, xi)) e`` with one shared ``xi``.

    ``oracle`` is either a plain callable ``f(x)`` or a value oracle with a
    ``sample(rng)`` method and signature ``f(x, xi)`` (see
    ``Problem.value_oracle``).  The direction is drawn before the
    realization.  Pass ``e`` to fix the direction.
    """
    x = np.asarray(x, dtype=float)
    n = x.size
    if e is None:
        e = sphere_direction(n, rng)
    tau = config.tau
    if hasattr(oracle, "sample"):
        xi = oracle.sample(rng)
        diff = oracle(x + tau * e, xi) - oracle(x - tau * e, xi)
    else:
        diff = oracle(x + tau * e) - oracle(x - tau * e)
    return (n / (2.0 * tau)) * diff * e


def zo_sgd(
    problem,
    x0=None,
    config: SmoothingConfig | None = None,
    schedule: StepSchedule | None = None,
    budget: RunBudget | None = None,
    seed: int = 0,
    record=None,
    timing: bool = False,
) -> RunTrace:
    """SGD on two-point estimates; each node contributes one estimate per step.

    Every estimate costs two value calls on its node.  The reported iterate
    is the last one.
    """
    config = config or SmoothingConfig()
    schedule = schedule or StepSchedule("constant", h=0.1)
    budget = budget or RunBudget(max_iterations=1000)
    oracles = [problem.value_oracle(k) for k in range(problem.m)]
    rngs = node_streams(seed, "zo", problem.m)
    x = start_point(problem, x0)
    trace = RunTrace("zo_sgd", meta={"tau": config.tau, "seed": seed, "schedule": schedule.to_dict()})
    rec = Recorder(trace, problem, every=record, timing=timing)
    gap = problem.suboptimality(x)
    guard = DivergenceGuard(gap)
    rec(0, gap)
    k = 0
    while not budget.reached(gap) and not budget.spent(k, problem.ledger):
        g = np.mean([two_point_estimate(oracles[i], x, config, rngs[i]) for i in range(problem.m)], axis=0)
        x = x - schedule(k) * g
        k += 1
        if not np.all(np.isfinite(x)):
            raise DivergenceError("non-finite iterate", trace=trace)
        gap = problem.suboptimality(x)
        guard.check(gap, trace)
        rec(k, gap)
    trace.x = x
    return rec.close()


def gradient_free_sliding(
    problem,
    term,
    x0=None,
    eps: float = 1e-3,
    R: float | None = None,
    config: SmoothingConfig | None = None,
    L: float | None = None,
    M: float | None = None,
    optimum: float | None = None,
    budget: RunBudget | None = None,
    seed: int = 0,
    record=None,
    timing: bool = False,
) -> RunTrace:
    """Gradient sliding whose inner loop sees only values of ``term``.

    The inner subgradient is replaced by the two-point estimate of ``term``
    (two value calls, counted in the ``value`` column); its second moment
    is about ``n M^2``, which sets the inner step counts.  ``config.tau``
    defaults to ``1e-4 R``.
    """
    if config is None:
        if R is None:
            raise ConfigurationError("need R or an explicit SmoothingConfig")
        config = SmoothingConfig(tau=1e-4 * R)
    return run_sliding(problem, term, x0, eps, R, L=L, M=M, optimum=optimum, budget=budget, record=record,
                       timing=timing, zo=config, seed=seed, name="gradient_free_sliding")
