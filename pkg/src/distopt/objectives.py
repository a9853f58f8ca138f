"""Objective functions, oracles and the accuracy/sample-size formulas.

A :class:`Problem` is a two-level finite sum

    f(x) = (1/m) sum_k f_k(x),    f_k(x) = (1/r) sum_j f_k^j(x)

over ``m`` nodes with ``r`` components each.  Every oracle call goes through
the problem's :class:`Ledger`, so traces can be reconciled against it.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Sequence

import numpy as np
from scipy import optimize

from .errors import ConfigurationError

__all__ = [
    "SmoothnessProfile",
    "QuadraticComponent",
    "LogisticComponent",
    "GaussianNoise",
    "SubsampleNoise",
    "Ledger",
    "Problem",
    "quadratic_problem",
    "random_quadratic",
    "logistic_problem",
    "regularize",
    "required_sample_size",
    "inner_accuracy",
    "batch_parallel_width",
]


def _ceil(value: float) -> int:
    # 1/0.01**2 must give 10**4, not 10**4 + 1
    return int(math.ceil(value * (1.0 - 1e-12)))


@dataclass(frozen=True)
class SmoothnessProfile:
    """Constants that parameterize every complexity formula.

    ``L`` is the worst node smoothness constant; ``L_mean`` the node average
    and ``L_component`` the worst single-component constant.  ``mu`` is the
    strong-convexity modulus of the global objective, ``mu_nodes`` the worst
    node modulus.  ``M`` is only known for nonsmooth model classes and may be
    left as ``None``.
    """

    L: float
    mu: float = 0.0
    M: float | None = None
    sigma2: float = 0.0
    R: float = 1.0
    delta_f: float = 0.0
    L_mean: float | None = None
    L_component: float | None = None
    mu_nodes: float | None = None

    def __post_init__(self):
        if not self.L >= self.mu >= 0:
            raise ConfigurationError(f"need L >= mu >= 0, got L={self.L}, mu={self.mu}")
        if self.sigma2 < 0:
            raise ConfigurationError("sigma2 must be non-negative")
        if not self.R > 0:
            raise ConfigurationError("R must be positive")
        if self.delta_f < 0:
            raise ConfigurationError("delta_f must be non-negative")
        if self.M is not None and self.M < 0:
            raise ConfigurationError("M must be non-negative")

    @property
    def condition(self) -> float:
        return self.L / self.mu if self.mu > 0 else math.inf


# --------------------------------------------------------------------------
# components


@dataclass(frozen=True, eq=False)
class QuadraticComponent:
    """``0.5 x'Ax - b'x + c`` with symmetric PSD ``A``."""

    A: np.ndarray
    b: np.ndarray
    c: float = 0.0

    def __post_init__(self):
        A = np.asarray(self.A, dtype=float)
        b = np.asarray(self.b, dtype=float)
        if A.ndim != 2 or A.shape[0] != A.shape[1] or b.shape != (A.shape[0],):
            raise ConfigurationError(f"incompatible shapes A{A.shape}, b{b.shape}")
        scale = max(np.abs(A).max(), 1.0)
        if np.abs(A - A.T).max() > 1e-12 * scale:
            raise ConfigurationError("A must be symmetric")
        eig = np.linalg.eigvalsh(A)
        if eig[0] < -1e-12 * max(eig[-1], 1.0):
            raise ConfigurationError("A must be positive semidefinite")
        object.__setattr__(self, "A", A)
        object.__setattr__(self, "b", b)
        object.__setattr__(self, "_eig", (max(eig[0], 0.0), max(eig[-1], 0.0)))

    @property
    def dim(self) -> int:
        return self.b.shape[0]

    @property
    def smoothness(self) -> float:
        return self._eig[1]

    @property
    def strong_convexity(self) -> float:
        return self._eig[0]

    def hessian_bounds(self):
        return self.A, self.A

    def value(self, x):
        return 0.5 * x @ self.A @ x - self.b @ x + self.c

    def grad(self, x):
        return self.A @ x - self.b


@dataclass(frozen=True, eq=False)
class LogisticComponent:
    """Mean logistic loss ``mean log(1 + exp(-y a'x)) + l2/2 |x|^2``."""

    features: np.ndarray
    labels: np.ndarray
    l2: float = 0.0

    def __post_init__(self):
        X = np.asarray(self.features, dtype=float)
        y = np.asarray(self.labels, dtype=float)
        if X.ndim != 2 or y.shape != (X.shape[0],):
            raise ConfigurationError("features must be (samples, dim) and labels (samples,)")
        if not np.all(np.abs(y) == 1):
            raise ConfigurationError("labels must be +1/-1")
        object.__setattr__(self, "features", X)
        object.__setattr__(self, "labels", y)
        gram = X.T @ X / X.shape[0]
        object.__setattr__(self, "_upper", 0.25 * gram + self.l2 * np.eye(X.shape[1]))
        object.__setattr__(self, "_L", float(np.linalg.eigvalsh(self._upper)[-1]))

    @property
    def dim(self) -> int:
        return self.features.shape[1]

    @property
    def smoothness(self) -> float:
        return self._L

    @property
    def strong_convexity(self) -> float:
        return self.l2

    def hessian_bounds(self):
        return self.l2 * np.eye(self.dim), self._upper

    def value(self, x):
        margins = self.labels * (self.features @ x)
        return np.mean(np.logaddexp(0.0, -margins)) + 0.5 * self.l2 * (x @ x)

    def grad(self, x):
        margins = self.labels * (self.features @ x)
        weights = -self.labels * _sigmoid(-margins)
        return self.features.T @ weights / self.features.shape[0] + self.l2 * x


def _sigmoid(z):
    return np.exp(-np.logaddexp(0.0, -z))


# --------------------------------------------------------------------------
# noise models


@dataclass(frozen=True)
class GaussianNoise:
    """Additive N(0, sigma2/n I) gradient noise, so E|noise|^2 = sigma2.

    The matching value oracle is ``f(x) + <z, x>`` with the same ``z``; its
    gradient in ``x`` is exactly the noisy gradient.
    """

    sigma2: float | None

    def __post_init__(self):
        if self.sigma2 is None:
            raise ConfigurationError("Gaussian noise model needs sigma2")
        if self.sigma2 < 0:
            raise ConfigurationError("sigma2 must be non-negative")


@dataclass(frozen=True)
class SubsampleNoise:
    """Uniform sampling of one component per call."""


# --------------------------------------------------------------------------
# ledger


_KINDS = ("full", "stochastic", "component", "value")


@dataclass
class Ledger:
    """Per-run oracle and communication counters."""

    nodes: int
    full: np.ndarray = field(init=False)
    stochastic: np.ndarray = field(init=False)
    component: np.ndarray = field(init=False)
    value: np.ndarray = field(init=False)
    comm_rounds: int = 0
    sent_numbers: int = 0

    def __post_init__(self):
        for kind in _KINDS:
            setattr(self, kind, np.zeros(self.nodes, dtype=np.int64))

    def charge(self, kind: str, node: int | None, count: int = 1):
        arr = getattr(self, kind)
        if node is None:
            arr += count
        else:
            arr[node] += count

    def communicate(self, rounds: int = 1, numbers: int = 0):
        self.comm_rounds += rounds
        self.sent_numbers += numbers

    def snapshot(self) -> dict:
        out = {kind: getattr(self, kind).tolist() for kind in _KINDS}
        out["comm_rounds"] = self.comm_rounds
        out["sent_numbers"] = self.sent_numbers
        return out

    def total(self) -> int:
        return int(sum(getattr(self, kind).sum() for kind in _KINDS))


# --------------------------------------------------------------------------
# problem


class Problem:
    """Finite-sum objective spread over ``m`` nodes with ``r`` components each.

    Parameters
    ----------
    components : sequence of sequences
        ``components[k][j]`` is the j-th component held by node k.  All
        nodes must hold the same number of components.
    noise : GaussianNoise, SubsampleNoise or None
        Stochastic-gradient model.  ``None`` forbids stochastic calls.
    reg_coef, reg_center : float, array
        Adds ``reg_coef/2 |x - reg_center|^2`` to every component.
    """

    def __init__(self, components: Sequence[Sequence], noise=None, reg_coef: float = 0.0, reg_center=None):
        comps = [list(row) for row in components]
        if not comps or not comps[0]:
            raise ConfigurationError("need at least one node with one component")
        r = len(comps[0])
        if any(len(row) != r for row in comps):
            raise ConfigurationError("every node must hold the same number of components")
        n = comps[0][0].dim
        if any(c.dim != n for row in comps for c in row):
            raise ConfigurationError("all components must share the dimension")
        if reg_coef < 0:
            raise ConfigurationError("reg_coef must be non-negative")
        self.components = comps
        self.m, self.r, self.n = len(comps), r, n
        self.noise = noise
        self.reg_coef = float(reg_coef)
        self.reg_center = np.zeros(n) if reg_center is None else np.asarray(reg_center, dtype=float).copy()
        self.ledger = Ledger(self.m)
        self.is_quadratic = all(isinstance(c, QuadraticComponent) for row in comps for c in row)
        self._solution = None
        self._bounds = None
        if self.is_quadratic:
            A = np.array([[c.A for c in row] for row in comps])
            b = np.array([[c.b for c in row] for row in comps])
            consts = np.array([[c.c for c in row] for row in comps])
            self._node_A = A.mean(axis=1)
            self._node_b = b.mean(axis=1)
            self._node_c = consts.mean(axis=1)

    # -- bookkeeping ------------------------------------------------------

    def fork(self) -> "Problem":
        """Same objective, fresh ledger.  Use one fork per run."""
        twin = object.__new__(Problem)
        twin.__dict__.update(self.__dict__)
        twin.ledger = Ledger(self.m)
        return twin

    def _check(self, x, node=None):
        x = np.asarray(x, dtype=float)
        if x.shape != (self.n,):
            raise ConfigurationError(f"expected a vector of dimension {self.n}, got shape {x.shape}")
        if node is not None and not 0 <= node < self.m:
            raise ConfigurationError(f"node {node} out of range for {self.m} nodes")
        return x

    def _reg_grad(self, x):
        if self.reg_coef:
            return self.reg_coef * (x - self.reg_center)
        return 0.0

    def _reg_value(self, x):
        if self.reg_coef:
            d = x - self.reg_center
            return 0.5 * self.reg_coef * (d @ d)
        return 0.0

    # -- exact pieces (unaudited helpers) -----------------------------------

    def _node_grad(self, x, k):
        if self.is_quadratic:
            g = self._node_A[k] @ x - self._node_b[k]
        else:
            g = sum(c.grad(x) for c in self.components[k]) / self.r
        return g + self._reg_grad(x)

    def _node_value(self, x, k):
        if self.is_quadratic:
            v = 0.5 * x @ self._node_A[k] @ x - self._node_b[k] @ x + self._node_c[k]
        else:
            v = sum(c.value(x) for c in self.components[k]) / self.r
        return v + self._reg_value(x)

    def objective(self, x, node: int | None = None) -> float:
        """Exact f (or f_k).  Instrumentation only: never counted as an oracle call."""
        x = self._check(x, node)
        if node is not None:
            return float(self._node_value(x, node))
        return float(np.mean([self._node_value(x, k) for k in range(self.m)]))

    def suboptimality(self, x) -> float:
        return self.objective(x) - self.f_star

    # -- oracles -------------------------------------------------------------

    def full_gradient(self, x, node: int | None = None) -> np.ndarray:
        """Exact gradient of f_k (or of f when ``node`` is None, charging every node)."""
        x = self._check(x, node)
        self.ledger.charge("full", node)
        if node is not None:
            return self._node_grad(x, node)
        return np.mean([self._node_grad(x, k) for k in range(self.m)], axis=0)

    def full_gradients(self, X) -> np.ndarray:
        """Row k of the result is the gradient of f_k at row k of ``X``."""
        X = np.asarray(X, dtype=float)
        if X.shape != (self.m, self.n):
            raise ConfigurationError(f"expected ({self.m}, {self.n}) node matrix, got {X.shape}")
        self.ledger.charge("full", None)
        if self.is_quadratic:
            G = np.einsum("kij,kj->ki", self._node_A, X) - self._node_b
            if self.reg_coef:
                G = G + self.reg_coef * (X - self.reg_center)
            return G
        return np.array([self._node_grad(X[k], k) for k in range(self.m)])

    def _noisy(self, x, k, rng):
        noise = self.noise
        if noise is None:
            raise ConfigurationError("no stochastic noise model configured")
        if isinstance(noise, GaussianNoise):
            g = self._node_grad(x, k)
            if noise.sigma2 == 0:
                return g
            return g + rng.normal(0.0, math.sqrt(noise.sigma2 / self.n), self.n)
        j = int(rng.integers(self.r))
        return self.components[k][j].grad(x) + self._reg_grad(x)

    def stochastic_gradient(self, x, node: int | None, rng) -> np.ndarray:
        """One unbiased stochastic gradient of f_k.

        With ``node=None`` every node contributes one sample and the
        average is returned (a minibatch of size ``m`` on the global f).
        """
        x = self._check(x, node)
        if node is not None:
            self.ledger.charge("stochastic", node)
            return self._noisy(x, node, rng)
        rngs = rng if isinstance(rng, (list, tuple)) else [rng] * self.m
        self.ledger.charge("stochastic", None)
        return np.mean([self._noisy(x, k, rngs[k]) for k in range(self.m)], axis=0)

    def stochastic_gradients(self, X, rngs) -> np.ndarray:
        """Per-node stochastic gradients, row k drawn from ``rngs[k]``."""
        X = np.asarray(X, dtype=float)
        if X.shape != (self.m, self.n):
            raise ConfigurationError(f"expected ({self.m}, {self.n}) node matrix, got {X.shape}")
        self.ledger.charge("stochastic", None)
        return np.array([self._noisy(X[k], k, rngs[k]) for k in range(self.m)])

    def batch_gradient(self, x, node: int, batch_size: int, rng) -> np.ndarray:
        """Mean of ``batch_size`` independent stochastic gradients at ``x``."""
        if batch_size < 1:
            raise ConfigurationError("batch size must be at least 1")
        x = self._check(x, node)
        self.ledger.charge("stochastic", node, batch_size)
        noise = self.noise
        if isinstance(noise, GaussianNoise) and noise.sigma2 > 0:
            # a (B, n) block consumes the stream exactly like B single draws
            draws = rng.normal(0.0, math.sqrt(noise.sigma2 / self.n), (batch_size, self.n))
            return self._node_grad(x, node) + draws.mean(axis=0)
        if isinstance(noise, GaussianNoise):
            return self._node_grad(x, node)
        return np.mean([self._noisy(x, node, rng) for _ in range(batch_size)], axis=0)

    def component_gradient(self, x, node: int, j: int) -> np.ndarray:
        x = self._check(x, node)
        if not 0 <= j < self.r:
            raise ConfigurationError(f"component {j} out of range for {self.r} components")
        self.ledger.charge("component", node)
        return self.components[node][j].grad(x) + self._reg_grad(x)

    def sample_xi(self, node: int, rng):
        """Draw a realization for the value oracle of node ``node``."""
        noise = self.noise
        if noise is None:
            return ()
        if isinstance(noise, GaussianNoise):
            if noise.sigma2 == 0:
                return np.zeros(self.n)
            return rng.normal(0.0, math.sqrt(noise.sigma2 / self.n), self.n)
        return int(rng.integers(self.r))

    def function_value(self, x, node: int | None = None, xi=None) -> float:
        """Value oracle.  Counted only when a realization ``xi`` is supplied.

        ``xi`` comes from :meth:`sample_xi`; ``()`` means the exact value.
        """
        x = self._check(x, node)
        if xi is None:
            return self.objective(x, node)
        if node is None:
            raise ConfigurationError("noisy values are node-scoped")
        self.ledger.charge("value", node)
        if isinstance(xi, tuple):
            return float(self._node_value(x, node))
        if isinstance(xi, (int, np.integer)):
            return float(self.components[node][xi].value(x) + self._reg_value(x))
        return float(self._node_value(x, node) + xi @ x)

    def value_oracle(self, node: int = 0):
        """Callable ``oracle(x, xi)`` with a ``sample(rng)`` method, for zeroth-order methods."""
        return _ValueOracle(self, node)

    # -- solution and constants ------------------------------------------------

    def _hessian_bounds(self):
        if self._bounds is None:
            lower = np.zeros((self.m, self.n, self.n))
            upper = np.zeros((self.m, self.n, self.n))
            for k, row in enumerate(self.components):
                for c in row:
                    lo, hi = c.hessian_bounds()
                    lower[k] += lo / self.r
                    upper[k] += hi / self.r
            eye = self.reg_coef * np.eye(self.n)
            self._bounds = (lower + eye, upper + eye)
        return self._bounds

    def node_constants(self):
        """Arrays (L_k, mu_k) of node smoothness and strong convexity."""
        lower, upper = self._hessian_bounds()
        L = np.array([np.linalg.eigvalsh(u)[-1] for u in upper])
        mu = np.array([max(np.linalg.eigvalsh(l)[0], 0.0) for l in lower])
        return L, mu

    def global_mu(self) -> float:
        lower, _ = self._hessian_bounds()
        return float(max(np.linalg.eigvalsh(lower.mean(axis=0))[0], 0.0))

    def component_L(self) -> float:
        return float(max(c.smoothness for row in self.components for c in row) + self.reg_coef)

    def _solve(self):
        if self._solution is not None:
            return self._solution
        if self.is_quadratic:
            H = self._node_A.mean(axis=0) + self.reg_coef * np.eye(self.n)
            rhs = self._node_b.mean(axis=0) + self.reg_coef * self.reg_center
            x = np.linalg.lstsq(H, rhs, rcond=None)[0]
        else:
            res = optimize.minimize(
                lambda z: self.objective(z),
                np.zeros(self.n),
                jac=lambda z: np.mean([self._node_grad(z, k) for k in range(self.m)], axis=0),
                method="L-BFGS-B",
                options={"gtol": 1e-12, "ftol": 1e-15, "maxiter": 10_000},
            )
            x = res.x
        self._solution = (x, self.objective(x))
        return self._solution

    @property
    def x_star(self) -> np.ndarray:
        return self._solve()[0].copy()

    @property
    def f_star(self) -> float:
        return self._solve()[1]

    def noise_variance(self) -> float:
        noise = self.noise
        if noise is None:
            return 0.0
        if isinstance(noise, GaussianNoise):
            return float(noise.sigma2)
        # subsampling has no uniform bound; report the variance at the optimum
        xs = self.x_star
        var = 0.0
        for k, row in enumerate(self.components):
            gk = self._node_grad(xs, k)
            var += np.mean([np.sum((c.grad(xs) + self._reg_grad(xs) - gk) ** 2) for c in row])
        return float(var / self.m)

    def profile(self, x0, M: float | None = None) -> SmoothnessProfile:
        """Constants measured at the start point ``x0``."""
        x0 = self._check(x0)
        L_nodes, mu_nodes = self.node_constants()
        R = float(np.linalg.norm(x0 - self.x_star))
        delta = max(self.objective(x0) - self.f_star, 0.0)
        mu = self.global_mu()
        L = float(L_nodes.max())
        return SmoothnessProfile(
            L=max(L, mu),
            mu=mu,
            M=M,
            sigma2=self.noise_variance(),
            R=R if R > 0 else 1.0,
            delta_f=delta,
            L_mean=float(L_nodes.mean()),
            L_component=self.component_L(),
            mu_nodes=float(mu_nodes.min()),
        )


class _ValueOracle:
    def __init__(self, problem: Problem, node: int):
        self.problem = problem
        self.node = node

    def sample(self, rng):
        return self.problem.sample_xi(self.node, rng)

    def __call__(self, x, xi=()):
        return self.problem.function_value(x, self.node, xi)


# --------------------------------------------------------------------------
# constructors


def quadratic_problem(A, b, c: float = 0.0, noise=None) -> Problem:
    """Single-node, single-component quadratic."""
    return Problem([[QuadraticComponent(np.atleast_2d(A), np.atleast_1d(b), c)]], noise=noise)


def _spectrum(dim, L, mu, kind):
    if dim == 1:
        return np.array([L])
    if kind == "linear":
        return np.linspace(mu, L, dim)
    if kind == "loguniform":
        if mu <= 0:
            raise ConfigurationError("loguniform spectrum needs mu > 0")
        return np.geomspace(mu, L, dim)
    raise ConfigurationError(f"unknown spectrum {kind!r}")


def random_quadratic(
    rng,
    nodes: int = 1,
    components: int = 1,
    dim: int = 10,
    L: float = 1.0,
    mu: float = 0.0,
    spectrum: str = "linear",
    spread: float = 1.0,
    R: float = 1.0,
    noise=None,
    rotate: bool = True,
) -> Problem:
    """Quadratic finite sum with a shared Hessian and scattered minimizers.

    Every component has Hessian ``Q diag(s) Q'`` with ``s`` spanning
    ``[mu, L]``, so L and mu of every node and of the global objective are
    exact.  Component minimizers are ``x* + spread * noise`` with the noise
    centered over all components, hence the global minimizer is ``x*`` with
    ``|x*| = R`` (start from the origin to get ``|x0 - x*| = R``).
    """
    if not L >= mu >= 0:
        raise ConfigurationError("need L >= mu >= 0")
    s = _spectrum(dim, L, mu, spectrum)
    Q = np.linalg.qr(rng.standard_normal((dim, dim)))[0] if rotate else np.eye(dim)
    A = (Q * s) @ Q.T
    A = 0.5 * (A + A.T)
    center = rng.standard_normal(dim)
    center *= R / np.linalg.norm(center)
    offsets = rng.standard_normal((nodes, components, dim)) / math.sqrt(dim)
    offsets -= offsets.mean(axis=(0, 1))
    mins = center + spread * offsets
    comps = []
    for k in range(nodes):
        row = []
        for j in range(components):
            b = A @ mins[k, j]
            row.append(QuadraticComponent(A, b, 0.5 * mins[k, j] @ b))
        comps.append(row)
    return Problem(comps, noise=noise)


def logistic_problem(
    rng,
    nodes: int = 1,
    components: int = 1,
    dim: int = 5,
    samples: int = 20,
    l2: float = 0.0,
    flip: float = 0.1,
    noise=None,
) -> Problem:
    """Logistic regression on seeded Gaussian features with planted labels.

    A fraction ``flip`` of labels is flipped so the data are not separable
    and the unregularized optimum exists.
    """
    w = rng.standard_normal(dim)
    comps = []
    for _ in range(nodes):
        row = []
        for _ in range(components):
            X = rng.standard_normal((samples, dim))
            y = np.where(X @ w >= 0, 1.0, -1.0)
            y[rng.random(samples) < flip] *= -1
            row.append(LogisticComponent(X, y, l2))
        comps.append(row)
    return Problem(comps, noise=noise)


# --------------------------------------------------------------------------
# regularization and accuracy translation


def regularize(problem: Problem, x0, eps: float, R: float) -> Problem:
    """Add ``eps/(2R^2) |x - x0|^2`` to every component.

    The returned problem shares component data with ``problem`` but has its
    own ledger; both L and mu grow by ``eps/R^2``.  The original problem is
    kept as ``.unregularized``.
    """
    if eps <= 0 or R <= 0:
        raise ConfigurationError("eps and R must be positive")
    x0 = problem._check(x0)
    coef = eps / R**2
    if problem.reg_coef:
        # |x - a|^2 c1 + |x - b|^2 c2 is again a single shifted square
        total = problem.reg_coef + coef
        center = (problem.reg_coef * problem.reg_center + coef * x0) / total
    else:
        total, center = coef, x0
    out = Problem(problem.components, noise=problem.noise, reg_coef=total, reg_center=center)
    out.unregularized = problem
    return out


def required_sample_size(profile: SmoothnessProfile, eps: float) -> int:
    """Online sample size ``min{M^2 R^2/eps^2, M^2/(mu eps)}`` with unit constants."""
    if eps <= 0:
        raise ConfigurationError("eps must be positive")
    if profile.M is None:
        raise ConfigurationError("profile.M is required")
    M2 = profile.M**2
    size = _ceil(M2 * profile.R**2 / eps**2)
    if profile.mu > 0:
        size = min(size, _ceil(M2 / (profile.mu * eps)))
    return max(size, 1)


def inner_accuracy(profile: SmoothnessProfile, eps: float) -> float:
    """Accuracy ``max{mu, eps/R^2} eps^2 / M^2`` needed on the regularized problem."""
    if eps <= 0:
        raise ConfigurationError("eps must be positive")
    if profile.M is None or profile.M == 0:
        raise ConfigurationError("profile.M must be positive")
    return max(profile.mu, eps / profile.R**2) * eps**2 / profile.M**2


def _log_factor(value):
    # Õ semantics: a logarithm below 1 does not shrink the count
    return max(math.log(value), 1.0) if value > 0 else 1.0


def batch_parallel_width(profile: SmoothnessProfile, eps: float, regime: str = "convex") -> int:
    """Number of nodes a batched accelerated method can use in parallel."""
    if eps <= 0:
        raise ConfigurationError("eps must be positive")
    s2, R, L, mu = profile.sigma2, profile.R, profile.L, profile.mu
    if regime == "convex":
        width = (s2 * R**2 / eps**2) / math.sqrt(L * R**2 / eps)
    elif regime == "strongly_convex":
        if mu <= 0:
            raise ConfigurationError("strongly convex regime needs mu > 0")
        width = (s2 / (mu * eps)) / (math.sqrt(L / mu) * _log_factor(mu * R**2 / eps))
    else:
        raise ConfigurationError(f"unknown regime {regime!r}")
    return max(_ceil(width), 1)
