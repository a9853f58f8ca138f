"""Gradient sliding for ``min f(x) + g(x)`` with separate oracle counters.

The smooth part ``f`` is the problem's objective (one exact gradient per
outer iteration, counted as a full call).  The nonsmooth part ``g`` is a
:class:`NonsmoothTerm`; its subgradient calls are counted in the
``component`` column of the ledger, its value calls (zeroth-order variant)
in the ``value`` column.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable

import numpy as np

from .. import kernels
from ..errors import BudgetExceeded, ConfigurationError, DivergenceError
from ..rng import stream
from ..trace import Recorder, RunBudget, RunTrace
from ._common import constants, start_point

__all__ = [
    "NonsmoothTerm",
    "L1Term",
    "gradient_sliding",
    "sliding_outer_steps",
    "sliding_inner_steps",
    "composite_optimum",
]


@dataclass(frozen=True)
class NonsmoothTerm:
    """Convex ``g`` given by a value and a subgradient map with Lipschitz bound ``M``."""

    value: Callable
    subgradient: Callable
    M: float

    def lipschitz(self, n: int) -> float:
        return self.M


@dataclass(frozen=True)
class L1Term:
    """``g(x) = weight * |x|_1``; ``weight = 0`` gives the zero term."""

    weight: float

    def __post_init__(self):
        if self.weight < 0:
            raise ConfigurationError("weight must be non-negative")

    def value(self, x) -> float:
        return self.weight * float(np.abs(x).sum())

    def subgradient(self, x) -> np.ndarray:
        return self.weight * np.sign(x)

    def lipschitz(self, n: int) -> float:
        return self.weight * math.sqrt(n)

    def prox(self, x, step):
        t = self.weight * step
        return np.sign(x) * np.maximum(np.abs(x) - t, 0.0)


def sliding_outer_steps(L: float, R: float, eps: float) -> int:
    """Smallest N with ``6 L R^2 / (N (N+1)) <= eps``."""
    if eps <= 0:
        raise ConfigurationError("eps must be positive")
    N = max(1, math.ceil(math.sqrt(6.0 * L * R**2 / eps)))
    while N > 1 and 6.0 * L * R**2 / ((N - 1) * N) <= eps:
        N -= 1
    while 6.0 * L * R**2 / (N * (N + 1)) > eps:
        N += 1
    return N


def sliding_inner_steps(k: int, N: int, L: float, M: float, R: float) -> int:
    """Inner iterations of outer stage ``k``: ``max(1, ceil(M^2 N k^2 / (D L^2)))`` with ``D = 3 R^2 / 8``."""
    D = 3.0 * R**2 / 8.0
    return max(1, math.ceil(M**2 * N * k**2 / (D * L**2)))


def composite_optimum(problem, term, tol: float = 1e-14, max_iter: int = 200_000):
    """Reference ``(x*, f(x*) + g(x*))`` by accelerated proximal gradient.

    Uses exact, uncounted gradients; ``term`` must provide ``prox``.
    """
    if not hasattr(term, "prox"):
        raise ConfigurationError("composite_optimum needs a term with a prox operator")
    L, mu = constants(problem)
    x = problem.x_star
    y, t = x.copy(), 1.0
    for _ in range(max_iter):
        g = np.mean([problem._node_grad(y, k) for k in range(problem.m)], axis=0)
        x_new = term.prox(y - g / L, 1.0 / L)
        t_new = 0.5 * (1.0 + math.sqrt(1.0 + 4.0 * t * t))
        y = x_new + ((t - 1.0) / t_new) * (x_new - x)
        done = np.linalg.norm(x_new - x) <= tol * max(1.0, np.linalg.norm(x))
        x, t = x_new, t_new
        if done:
            break
    return x, problem.objective(x) + term.value(x)


def _inner(term, g, x, beta, T, zo, rng, n):
    """Prox-sliding inner loop; returns ``(u_T, averaged u)``."""
    if zo is not None:
        dirs = rng.standard_normal((T, n))
        dirs /= np.linalg.norm(dirs, axis=1, keepdims=True)
    if isinstance(term, L1Term):
        if zo is None:
            return kernels.sliding_l1(g, x, beta, T, term.weight, np.empty((0, n)), 0.0)
        return kernels.sliding_l1(g, x, beta, T, term.weight, dirs, zo.tau)
    u = x.copy()
    ut = u.copy()
    for t in range(1, T + 1):
        p = 0.5 * t
        theta = 2.0 * (t + 1) / (t * (t + 3.0))
        if zo is None:
            sub = term.subgradient(u)
        else:
            e = dirs[t - 1]
            sub = (n / (2.0 * zo.tau)) * (term.value(u + zo.tau * e) - term.value(u - zo.tau * e)) * e
        u = (beta * x + beta * p * u - g - sub) / (beta * (1.0 + p))
        ut = (1.0 - theta) * ut + theta * u
    return u, ut


def run_sliding(problem, term, x0, eps, R, L=None, M=None, optimum=None, budget=None, record=None,
                timing=False, zo=None, seed=0, name="gradient_sliding"):
    if problem.m != 1:
        raise ConfigurationError("sliding is centralized: the problem must have one node")
    n = problem.n
    L, _ = constants(problem, L)
    if M is None:
        M = term.lipschitz(n)
    if R is None or R <= 0:
        raise ConfigurationError("sliding needs R > 0, a bound on |x0 - x*|")
    x = start_point(problem, x0)
    # the two-point estimate of a Lipschitz term has second moment about n M^2
    M_eff = M * math.sqrt(n) if zo is not None else M
    N = sliding_outer_steps(L, R, eps)
    if optimum is None:
        optimum = composite_optimum(problem, term)[1]
    psi = lambda z: problem.objective(z) + term.value(z) - optimum
    trace = RunTrace(name, meta={"L": L, "M": M, "R": R, "eps": eps, "N": N, "seed": seed})
    if zo is not None:
        trace.meta["tau"] = zo.tau
    rec = Recorder(trace, problem, every=record, timing=timing)
    rng = stream(seed, "sliding") if zo is not None else None
    xbar = x.copy()
    rec(0, psi(xbar))
    inner_total = 0
    for k in range(1, N + 1):
        if budget is not None and budget.spent(k - 1, problem.ledger):
            raise BudgetExceeded(f"budget exhausted after {k - 1} of {N} outer steps", partial=rec.close())
        gamma = 2.0 / (k + 1)
        beta = 2.0 * L / k
        T = sliding_inner_steps(k, N, L, M_eff, R)
        xlow = (1.0 - gamma) * xbar + gamma * x
        g = problem.full_gradient(xlow)
        x, xt = _inner(term, g, x, beta, T, zo, rng, n)
        if zo is None:
            problem.ledger.charge("component", 0, T)
        else:
            problem.ledger.charge("value", 0, 2 * T)
        inner_total += T
        xbar = (1.0 - gamma) * xbar + gamma * xt
        if not np.all(np.isfinite(xbar)):
            raise DivergenceError("non-finite iterate", trace=trace)
        rec(k, lambda z=xbar: psi(z))
    trace.x = xbar
    trace.meta["inner_total"] = inner_total
    return rec.close()


def gradient_sliding(
    problem,
    term,
    x0=None,
    eps: float = 1e-3,
    R: float | None = None,
    L: float | None = None,
    M: float | None = None,
    optimum: float | None = None,
    budget: RunBudget | None = None,
    record=None,
    timing: bool = False,
) -> RunTrace:
    """Gradient sliding with an exact subgradient oracle for ``term``.

    The number of outer steps ``N`` is fixed in advance from ``(L, R, eps)``;
    outer stage ``k`` runs :func:`sliding_inner_steps` subgradient steps.
    ``optimum`` is the reference value of ``f + g`` used for the trace and
    defaults to :func:`composite_optimum`.  The trace tracks the gap of the
    averaged point ``xbar``.
    """
    return run_sliding(problem, term, x0, eps, R, L=L, M=M, optimum=optimum, budget=budget,
                       record=record, timing=timing)
