"""Acceptance suite: one check per scaling law or contract.

Each ``criterion_<i>`` returns a :class:`CriterionResult`; :func:`run_all`
prints one PASS/FAIL line per criterion.  Every check runs in well under a
few minutes on one core.
"""

from __future__ import annotations

import itertools
import math
import time
from dataclasses import dataclass, field

import numpy as np

from . import optimizers as opt
from .compressors import Compressor, rand_k, top_k
from .harness.export import trace_csv
from .harness.runner import run_experiment
from .harness.sweep import fit_slope, sweep
from .objectives import (
    GaussianNoise,
    LogisticComponent,
    Problem,
    QuadraticComponent,
    SmoothnessProfile,
    inner_accuracy,
    quadratic_problem,
    random_quadratic,
    regularize,
    required_sample_size,
)
from .rng import stream
from .topology import make_graph, static_schedule
from .trace import RunBudget, StepSchedule
from .zeroth_order import SmoothingConfig, two_point_estimate

__all__ = ["CriterionResult", "CRITERIA", "run_criterion", "run_all"]


@dataclass
class CriterionResult:
    number: int
    title: str
    passed: bool
    summary: str
    details: dict = field(default_factory=dict)
    seconds: float = 0.0

    def line(self) -> str:
        tag = "PASS" if self.passed else "FAIL"
        return f"[{tag}] criterion {self.number:2d} {self.title}: {self.summary} ({self.seconds:.1f}s)"


def _slope_ok(fit, target, tol):
    return abs(fit.slope - target) <= tol


# --------------------------------------------------------------------------
# 1. consensus


def criterion_1():
    base = {
        "version": 1,
        "seed": 0,
        "topology": {"kind": "ring", "m": 16},
        "algorithm": {"name": "consensus", "params": {"method": "plain", "tol": 1e-6, "dim": 3}},
        "budget": {"max_iterations": 200_000},
        "record": 1_000_000,
    }
    fits, drift, ok = {}, 0.0, True
    for method in ("plain", "chebyshev"):
        spec = {
            "base": {**base, "algorithm": {"name": "consensus", "params": {**base["algorithm"]["params"], "method": method}}},
            "vary": {"topology.m": [16, 32, 64, 128]},
            "fits": [{"x": "meta.chi", "y": "meta.rounds"}],
        }
        res = sweep(spec)
        if any(c.error for c in res.cells) or not res.fits:
            return False, "a consensus run failed", {}
        fits[method] = res.fits[0]
        for c in res.cells:
            drift = max(drift, c.result.trace.meta["mean_drift"])
            ok &= c.result.trace.final.consensus_err <= 1e-6 * c.result.trace.records[0].consensus_err
    passed = ok and _slope_ok(fits["plain"], 1.0, 0.15) and _slope_ok(fits["chebyshev"], 0.5, 0.15) and drift <= 1e-10
    summary = (f"plain slope {fits['plain'].slope:.3f} (1.0+-0.15), chebyshev slope {fits['chebyshev'].slope:.3f} "
               f"(0.5+-0.15), max mean drift {drift:.1e} (<=1e-10)")
    return passed, summary, {"plain": fits["plain"].to_dict(), "chebyshev": fits["chebyshev"].to_dict(), "drift": drift}


# --------------------------------------------------------------------------
# 2. SGD 1/k law


def criterion_2():
    p = random_quadratic(stream(2, "sgd_law"), dim=10, L=4.0, mu=1.0, spectrum="linear", noise=GaussianNoise(1.0))
    marks = sorted({int(round(v)) for v in np.geomspace(1e3, 1e5, 11)})
    sched = StepSchedule("inverse_mu", mu=1.0)
    curves = []
    for seed in range(20):
        tr = opt.sgd(p.fork(), np.zeros(10), sched, RunBudget(max_iterations=marks[-1]), seed=seed, record=marks)
        by = {r.round: r.subopt for r in tr.records}
        curves.append([by[k] for k in marks])
    mean = np.mean(curves, axis=0)
    fit = fit_slope(marks, mean, "k", "subopt")
    return _slope_ok(fit, -1.0, 0.2), f"slope {fit.slope:.3f} +- {fit.stderr:.3f} (-1+-0.2)", {"fit": fit.to_dict()}


# --------------------------------------------------------------------------
# 3. accelerated certificate and sqrt(L/mu) law


def criterion_3():
    worst = 0.0
    # a log-uniform spectrum needs mu > 0; mu = 0 instances use a linear one
    cases = [(0.0, "linear", 50), (0.0, "linear", 20), (1e-3, "loguniform", 50), (1e-2, "linear", 10)]
    for seed, (mu, spectrum, n) in enumerate(cases):
        p = random_quadratic(stream(seed, "stm_cert"), dim=n, L=1.0, mu=mu, spectrum=spectrum)
        L = 1.0
        R = float(np.linalg.norm(p.x_star))
        tr = opt.accelerated_gradient(p, np.zeros(n), L=L, budget=RunBudget(max_iterations=2000))
        for rec in tr.records[1:]:
            worst = max(worst, rec.subopt / opt.stm_certificate(L, R, rec.round))
    kappas = [1e2, 1e3, 1e4]
    iters = []
    for kappa in kappas:
        p = random_quadratic(stream(3, "stm_kappa"), dim=50, L=kappa, mu=1.0, spectrum="loguniform")
        tr = opt.accelerated_gradient(p, np.zeros(50), budget=RunBudget(target_eps=1e-9, max_iterations=10**6), record=10**9)
        iters.append(tr.final.round)
    fit = fit_slope(kappas, iters, "L/mu", "iterations")
    passed = worst <= 1.0 and _slope_ok(fit, 0.5, 0.15)
    return passed, (f"max gap/certificate {worst:.3f} (<=1), iterations {iters}, slope {fit.slope:.3f} (0.5+-0.15)"), {
        "ratio": worst, "fit": fit.to_dict()}


# --------------------------------------------------------------------------
# 4. variance reduction vs full-gradient acceleration


def criterion_4():
    p = random_quadratic(stream(1, "vr"), components=1000, dim=20, L=1.0, mu=1e-4, spectrum="loguniform", spread=1.0)
    x0 = np.zeros(20)
    vr = opt.variance_reduced(p.fork(), x0, RunBudget(target_eps=1e-6, max_iterations=5_000_000), seed=0, record=10**9)
    base = opt.accelerated_gradient(p.fork(), x0, budget=RunBudget(target_eps=1e-6, max_iterations=10**6), record=10**9)
    vr_calls = int(vr.calls("component").sum())
    base_calls = base.final.round * p.m * p.r
    passed = vr.final.subopt <= 1e-6 and base.final.subopt <= 1e-6 and 5 * vr_calls <= base_calls
    return passed, (f"VR {vr_calls} component calls vs baseline {base_calls} (ratio {base_calls / vr_calls:.1f}, need >= 5)"), {
        "vr": vr_calls, "baseline": base_calls}


# --------------------------------------------------------------------------
# 5. sliding oracle separation


def sliding_instance(n=10, weight=0.005, seed=0):
    c = stream(seed, "sliding").standard_normal(n)
    c /= np.linalg.norm(c)
    problem = quadratic_problem(np.eye(n), c, 0.5 * c @ c)
    term = opt.L1Term(weight)
    return problem, term


def criterion_5():
    p, term = sliding_instance()
    xs, value = opt.composite_optimum(p, term)
    R = float(np.linalg.norm(xs))
    eps_grid = [1e-2, 1e-3, 1e-4, 1e-5]
    f_calls, g_calls, reached = [], [], True
    for eps in eps_grid:
        tr = opt.gradient_sliding(p.fork(), term, np.zeros(p.n), eps=eps, R=R, optimum=value, record=10**9)
        f_calls.append(int(tr.final.calls["full"][0]))
        g_calls.append(int(tr.final.calls["component"][0]))
        reached &= tr.final.subopt <= eps
    inv = [1 / e for e in eps_grid]
    ff = fit_slope(inv, f_calls, "1/eps", "grad f calls")
    fg = fit_slope(inv, g_calls, "1/eps", "subgrad g calls")
    passed = reached and _slope_ok(ff, 0.5, 0.15) and _slope_ok(fg, 2.0, 0.3)
    return passed, f"grad-f slope {ff.slope:.3f} (0.5+-0.15), subgrad-g slope {fg.slope:.3f} (2+-0.3), targets met: {reached}", {
        "f": ff.to_dict(), "g": fg.to_dict(), "f_calls": f_calls, "g_calls": g_calls}


# --------------------------------------------------------------------------
# 6. decentralized accelerated scaling


def split_quadratic(m, kappa, seed=0, dim=10):
    """One fixed global quadratic split over ``m`` nodes with zero-mean offsets."""
    return random_quadratic(stream(seed, "dec_acc"), nodes=m, dim=dim, L=kappa, mu=1.0, spectrum="linear", spread=1.0)


def criterion_6():
    eps = 1e-6
    chis, rounds, calls_ok, details = [], [], True, []
    for m in (8, 16, 32, 64):
        p = split_quadratic(m, 1e2)
        s = static_schedule(make_graph("ring", m))
        tr = opt.decentralized_accelerated(p.fork(), s, np.zeros(p.n), eps=eps, record=10**9)
        central = opt.accelerated_gradient(p.fork(), np.zeros(p.n), budget=RunBudget(target_eps=eps, max_iterations=10**6), record=10**9)
        calls_ok &= tr.final.subopt <= eps and max(tr.final.calls["full"]) <= 3 * central.final.round
        chis.append(s.chi)
        rounds.append(tr.final.comm_rounds)
        details.append((m, tr.final.round, central.final.round))
    fit_chi = fit_slope(chis, rounds, "chi", "rounds")
    kappas, krounds = [1e2, 1e3, 1e4], []
    s = static_schedule(make_graph("ring", 16))
    for kappa in kappas:
        p = split_quadratic(16, kappa)
        tr = opt.decentralized_accelerated(p.fork(), s, np.zeros(p.n), eps=eps, record=10**9)
        central = opt.accelerated_gradient(p.fork(), np.zeros(p.n), budget=RunBudget(target_eps=eps, max_iterations=10**6), record=10**9)
        calls_ok &= tr.final.subopt <= eps and max(tr.final.calls["full"]) <= 3 * central.final.round
        krounds.append(tr.final.comm_rounds)
    fit_k = fit_slope(kappas, krounds, "L/mu", "rounds")
    passed = calls_ok and _slope_ok(fit_chi, 0.5, 0.15) and _slope_ok(fit_k, 0.5, 0.15)
    return passed, (f"chi slope {fit_chi.slope:.3f}, L/mu slope {fit_k.slope:.3f} (0.5+-0.15), "
                    f"per-node calls within 3x of centralized: {calls_ok}"), {
        "chi": fit_chi.to_dict(), "kappa": fit_k.to_dict(), "iterations": details}


# --------------------------------------------------------------------------
# 7. local SGD statistical term


def local_sgd_instance(seed=2, dim=20):
    base = random_quadratic(stream(seed, "local"), dim=dim, L=1.0, mu=1e-4, spectrum="loguniform")
    return base.components[0][0]


def criterion_7():
    comp = local_sgd_instance()
    ms, errs = [1, 4, 16, 64], []
    for m in ms:
        p = Problem([[comp]] * m, noise=GaussianNoise(1.0))
        vals = [opt.local_sgd(p.fork(), np.zeros(comp.dim), K=20, T=50, seed=s, record=10**9).final.subopt for s in range(20)]
        errs.append(float(np.mean(vals)))
    fit = fit_slope(ms, errs, "m", "error")
    return _slope_ok(fit, -0.5, 0.15), f"slope {fit.slope:.3f} (-0.5+-0.15), errors {[f'{e:.2e}' for e in errs]}", {
        "fit": fit.to_dict()}


# --------------------------------------------------------------------------
# 8. compressor contracts


class _FixedSubset:
    """Stand-in generator whose ``choice`` returns a preset subset."""

    def __init__(self, subset):
        self.subset = np.array(subset)

    def choice(self, n, size, replace=False):
        return self.subset


def randk_exact_variance(z, k):
    """Exact E|Q(z) - z|^2 of scaled RandK by enumerating all k-subsets."""
    n = z.size
    subsets = list(itertools.combinations(range(n), k))
    total = sum(float(np.sum((rand_k(z, k, _FixedSubset(s)) - z) ** 2)) for s in subsets)
    return total / len(subsets)


def criterion_8():
    rng = stream(8, "compress_check")
    n = 32
    worst = -np.inf
    for i in range(10_000):
        z = rng.standard_normal(n) * rng.exponential()
        k = int(rng.integers(1, n + 1))
        lhs = float(np.sum((top_k(z, k) - z) ** 2))
        worst = max(worst, lhs - (1 - k / n) * float(z @ z))
    contraction = worst <= 1e-12
    exact_err = 0.0
    for n_small in range(2, 7):
        for k in range(1, n_small + 1):
            z = rng.standard_normal(n_small)
            exact = randk_exact_variance(z, k)
            target = (n_small / k - 1.0) * float(z @ z)
            exact_err = max(exact_err, abs(exact - target) / max(target, 1e-300) if target else abs(exact))
    z = rng.standard_normal(64)
    draws = np.array([np.sum((rand_k(z, 16, rng) - z) ** 2) for _ in range(40_000)])
    mc_rel = abs(draws.mean() / ((64 / 16 - 1) * float(z @ z)) - 1.0)
    ratio = compressed_inflation()
    passed = contraction and exact_err <= 1e-12 and mc_rel <= 0.02 and 1.0 <= ratio <= 4.0
    return passed, (f"topk worst excess {worst:.1e} (<=0), enumeration rel err {exact_err:.1e}, "
                    f"MC rel err {mc_rel:.4f} (<=0.02), round inflation {ratio:.2f} (in [1,4])"), {
        "topk": worst, "enum": exact_err, "mc": mc_rel, "inflation": ratio}


def compressed_inflation(seeds=20):
    """Mean rounds to 1e-3 with scaled RandK (k = n/2) over those with no compression."""
    n, m = 20, 4
    p = random_quadratic(stream(0, "comp"), nodes=m, dim=n, L=1.0, mu=0.01, spectrum="linear", spread=0.0,
                         noise=GaussianNoise(0.0))
    step = StepSchedule("constant", h=1.0)
    budget = RunBudget(target_eps=1e-3, max_iterations=10**5)
    rounds = {}
    for comp in (Compressor("identity"), Compressor("randk_scaled", n // 2)):
        rounds[comp.kind] = np.mean([
            opt.compressed_distributed_sgd(p.fork(), comp, np.zeros(n), step, budget, seed=s, record=10**9).final.comm_rounds
            for s in range(seeds)
        ])
    return float(rounds["randk_scaled"] / rounds["identity"])


# --------------------------------------------------------------------------
# 9. regularization


def _level_points(problem, x_eps, level, rng, count):
    """Points with regularized gap exactly ``level`` around the minimizer ``x_eps``."""
    H = problem._node_A.mean(axis=0) + problem.reg_coef * np.eye(problem.n)
    out = []
    for _ in range(count):
        d = rng.standard_normal(problem.n)
        scale = math.sqrt(2.0 * level / float(d @ H @ d))
        out.append(x_eps + scale * d)
    return out


def criterion_9():
    rng = stream(9, "reg")
    worst = -np.inf
    level_ok = True
    for trial in range(3):
        base = random_quadratic(stream(trial, "reg_problem"), dim=8, L=1.0, mu=0.0, spectrum="linear", R=2.0)
        x0 = np.zeros(8)
        R = float(np.linalg.norm(base.x_star - x0))
        for eps in (1e-1, 1e-2, 1e-3):
            reg = regularize(base, x0, eps, R)
            x_eps = reg.x_star
            for x in [x_eps] + _level_points(reg, x_eps, eps / 2, rng, 200):
                level_ok &= reg.suboptimality(x) <= eps / 2 * (1 + 1e-9)
                worst = max(worst, base.suboptimality(x) - eps)
    cases = [
        (SmoothnessProfile(L=1.0, mu=0.5, M=2.0, R=4.0), 0.25, 32, 0.0078125),
        (SmoothnessProfile(L=1.0, mu=0.0, M=2.0, R=4.0), 0.25, 1024, 0.000244140625),
        (SmoothnessProfile(L=2.0, mu=0.125, M=1.0, R=1.0), 0.5, 4, 0.125),
    ]
    formulas = all(required_sample_size(pf, e) == n_ref and inner_accuracy(pf, e) == acc_ref for pf, e, n_ref, acc_ref in cases)
    passed = level_ok and worst <= 0.0 and formulas
    return passed, (f"max (original gap - eps) {worst:.2e} (<=0), regularized gaps <= eps/2: {level_ok}, "
                    f"formulas exact: {formulas}"), {"worst": worst}


# --------------------------------------------------------------------------
# 10. oracle hygiene


def _fd_check(value, grad, x, h=1e-6):
    g = grad(x)
    fd = np.array([(value(x + h * e) - value(x - h * e)) / (2 * h) for e in np.eye(x.size)])
    return float(np.linalg.norm(g - fd) / max(np.linalg.norm(g), 1e-8))


def _hygiene_runs():
    """Small run of every optimizer, each with its own fork; yields (trace, problem)."""
    rq = lambda **kw: random_quadratic(stream(10, "hyg", kw.get("nodes", 1)), dim=5, L=2.0, mu=0.2, **kw)
    noisy = rq(nodes=4, noise=GaussianNoise(0.5))
    ring = static_schedule(make_graph("ring", 4))
    sliding_p, term = sliding_instance(n=5, weight=0.05)
    xs, value = opt.composite_optimum(sliding_p, term)
    R = float(np.linalg.norm(xs))
    budget = RunBudget(max_iterations=30)
    cases = [
        lambda p: opt.sgd(p, None, StepSchedule("constant", h=0.2), budget, seed=1),
        lambda p: opt.accelerated_gradient(p, None, budget=budget, batch=3, seed=1),
        lambda p: opt.decentralized_sgd(p, ring, None, StepSchedule("constant", h=0.1), budget, local_steps=2, seed=1),
        lambda p: opt.decentralized_sgd(p, ring, None, StepSchedule("constant", h=0.1), budget,
                                        compressor=Compressor("randk_scaled", 2), seed=1),
        lambda p: opt.decentralized_accelerated(p, ring, None, eps=1e-4, budget=budget),
        lambda p: opt.compressed_distributed_sgd(p, Compressor("simplex_vertex"), None, StepSchedule("constant", h=0.1), budget, seed=1),
    ]
    for run in cases:
        p = noisy.fork()
        yield run(p), p
    p = rq(components=7)
    yield opt.variance_reduced(p, None, budget, seed=2), p
    p = Problem([[noisy.components[0][0]]] * 3, noise=GaussianNoise(0.5))
    yield opt.local_sgd(p, None, K=5, T=4, seed=3), p
    p = sliding_p.fork()
    yield opt.gradient_sliding(p, term, None, eps=1e-2, R=R, optimum=value), p
    from .zeroth_order import gradient_free_sliding, zo_sgd

    p = sliding_p.fork()
    yield gradient_free_sliding(p, term, None, eps=1e-2, R=R, optimum=value, seed=4), p
    p = noisy.fork()
    yield zo_sgd(p, None, SmoothingConfig(1e-3), StepSchedule("constant", h=0.02), budget, seed=5), p


def _reconciles(trace, problem):
    last = trace.final
    led = problem.ledger
    return (
        last.comm_rounds == led.comm_rounds
        and last.sent_numbers == led.sent_numbers
        and all(tuple(int(v) for v in getattr(led, kind)) == tuple(last.calls[kind])
                for kind in ("full", "stochastic", "component", "value"))
    )


_CSV_CONFIGS = [
    {"version": 1, "seed": 11, "problem": {"kind": "random_quadratic", "dim": 6, "L": 4.0, "mu": 1.0, "noise": {"kind": "gaussian", "sigma2": 1.0}},
     "algorithm": {"name": "sgd", "params": {"schedule": {"kind": "inverse_mu", "mu": 1.0}}}, "budget": {"max_iterations": 300}},
    {"version": 1, "seed": 12, "problem": {"kind": "random_quadratic", "nodes": 6, "dim": 4, "mu": 0.1, "noise": {"kind": "gaussian", "sigma2": 1.0}},
     "topology": {"kind": "erdos_renyi", "m": 6, "p": 0.5}, "compressor": {"kind": "randk_scaled", "k": 2},
     "algorithm": {"name": "decentralized_sgd", "params": {"step": {"kind": "constant", "h": 0.1}}}, "budget": {"max_iterations": 50}},
    {"version": 1, "seed": 13, "problem": {"kind": "logistic", "components": 20, "dim": 4, "l2": 0.1},
     "algorithm": {"name": "variance_reduced"}, "budget": {"max_iterations": 200}, "repeats": 2},
]


def criterion_10():
    rng = stream(10, "fd")
    fd = 0.0
    comps = [
        QuadraticComponent(np.diag([1.0, 2.0, 3.0]), np.array([1.0, -1.0, 0.5]), 0.3),
        LogisticComponent(rng.standard_normal((15, 3)), np.where(rng.random(15) < 0.5, -1.0, 1.0), 0.05),
    ]
    for c in comps:
        for _ in range(5):
            fd = max(fd, _fd_check(c.value, c.grad, rng.standard_normal(3)))
    for p in (random_quadratic(stream(1, "fdq"), nodes=3, components=2, dim=4, mu=0.1),):
        reg = regularize(p, np.ones(4), 0.1, 1.0)
        for q in (p, reg):
            fd = max(fd, _fd_check(q.objective, lambda x, q=q: q.fork().full_gradient(x), rng.standard_normal(4)))
    c_lin = np.array([1.0, -2.0, 0.5, 3.0, 0.0, -1.0])
    cfg = SmoothingConfig(tau=0.3)
    zrng = stream(10, "zo_linear")
    draws = np.array([two_point_estimate(lambda x: float(c_lin @ x) + 4.0, np.ones(6), cfg, zrng) for _ in range(100_000)])
    se = draws.std(axis=0, ddof=1) / math.sqrt(len(draws))
    zo_ok = bool(np.all(np.abs(draws.mean(axis=0) - c_lin) <= 4 * se))
    ledgers = all(_reconciles(tr, p) for tr, p in _hygiene_runs())
    same = all(
        [trace_csv(t) for t in run_experiment(c).traces] == [trace_csv(t) for t in run_experiment(c).traces]
        for c in _CSV_CONFIGS
    )
    passed = fd <= 1e-6 and zo_ok and ledgers and same
    return passed, (f"max FD rel err {fd:.1e} (<=1e-6), ZO linear unbiased: {zo_ok}, ledgers reconcile: {ledgers}, "
                    f"byte-identical CSV: {same}"), {"fd": fd}


CRITERIA = {
    1: ("consensus rate separation", criterion_1),
    2: ("SGD 1/k law", criterion_2),
    3: ("accelerated certificate and sqrt(L/mu) law", criterion_3),
    4: ("variance-reduction advantage", criterion_4),
    5: ("sliding oracle separation", criterion_5),
    6: ("decentralized accelerated scaling", criterion_6),
    7: ("local SGD statistical term", criterion_7),
    8: ("compressor contracts", criterion_8),
    9: ("regularization correctness", criterion_9),
    10: ("oracle hygiene", criterion_10),
}


def run_criterion(number: int) -> CriterionResult:
    title, fn = CRITERIA[number]
    t0 = time.perf_counter()
    passed, summary, details = fn()
    return CriterionResult(number, title, bool(passed), summary, details, time.perf_counter() - t0)


def run_all(numbers=None, echo=print) -> list:
    out = []
    for number in numbers or sorted(CRITERIA):
        res = run_criterion(number)
        if echo is not None:
            echo(res.line())
        out.append(res)
    return out
