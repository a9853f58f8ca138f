"""Deterministic execution of one experiment configuration."""

from __future__ import annotations

from dataclasses import dataclass, field
from types import SimpleNamespace

import numpy as np

from .. import optimizers as opt
from .. import zeroth_order as zo
from ..consensus import ChebyshevIteration, consensus_error, gossip_round
from ..errors import ConfigurationError
from ..objectives import Ledger
from ..rng import derive_seed, stream
from ..trace import Recorder, RunBudget, RunTrace, StepSchedule
from .config import build_budget, build_compressor, build_problem, build_schedule, start_point, validate

__all__ = ["ExperimentResult", "run_experiment", "run_single", "repeat_seeds", "ALGORITHMS"]

_PARAMS = {
    "consensus": {"method", "tol", "dim"},
    "sgd": {"schedule", "averaging", "fast"},
    "accelerated_gradient": {"L", "mu", "batch", "distributed"},
    "variance_reduced": {"L", "mu", "anchor_batch"},
    "gradient_sliding": {"term", "eps", "R", "L", "M"},
    "decentralized_sgd": {"step", "local_steps", "consensus_step"},
    "decentralized_accelerated": {"eps", "delta", "L", "mu", "batch"},
    "local_sgd": {"K", "T", "step", "fast"},
    "compressed_distributed_sgd": {"step", "topology"},
    "zo_sgd": {"tau", "schedule"},
    "gradient_free_sliding": {"term", "eps", "R", "L", "M", "tau"},
}
ALGORITHMS = tuple(_PARAMS)


@dataclass
class ExperimentResult:
    """Traces of every repeat plus the mean suboptimality over repeats.

    ``aggregate`` maps ``"round"`` to the rounds recorded by every repeat
    and ``"subopt_mean"`` to the mean recorded suboptimality there.
    """

    config: dict
    seeds: list
    traces: list
    aggregate: dict = field(default_factory=dict)

    @property
    def trace(self) -> RunTrace:
        return self.traces[0]


def repeat_seeds(seed: int, repeats: int) -> list:
    """The config seed itself for one repeat, derived child seeds otherwise."""
    if repeats == 1:
        return [seed]
    return [derive_seed(seed, "repeat", i) for i in range(repeats)]


def _step(params, key):
    return StepSchedule(**params[key]) if key in params else None


def _term(spec):
    if spec is None:
        return opt.L1Term(0.0)
    if spec.get("kind") != "l1":
        raise ConfigurationError("only the l1 nonsmooth term is configurable")
    return opt.L1Term(float(spec.get("weight", 0.0)))


def _sliding_radius(problem, term, x0, R):
    if R is not None:
        return R, None
    xs, value = opt.composite_optimum(problem, term)
    return float(np.linalg.norm(x0 - xs)) or 1.0, value


def _consensus(config, budget, params, seed, record):
    spec = config.get("topology")
    schedule = build_schedule(config)
    m = schedule.m
    dim = params.get("dim", 1)
    X = stream(seed, "consensus_init").standard_normal((m, dim))
    mean0 = X.mean(axis=0)
    method = params.get("method", "plain")
    tol = params.get("tol", 1e-6)
    holder = SimpleNamespace(ledger=Ledger(m))
    trace = RunTrace("consensus", meta={"method": method, "tol": tol, "chi": schedule.chi, "m": m, "graph": spec["kind"]})
    rec = Recorder(trace, holder, every=record)
    err0 = consensus_error(X)
    target = tol * err0
    # the tracked quantity of an averaging run is its consensus error
    rec(0, err0, err0)
    drift = 0.0
    if method == "chebyshev":
        if not schedule.is_static:
            raise ConfigurationError("Chebyshev consensus needs a static topology")
        cheb = ChebyshevIteration(schedule.static_matrix, X, holder.ledger)
        step = cheb.step
    elif method == "plain":
        state = {"X": X}

        def step():
            state["X"] = gossip_round(schedule(holder.ledger.comm_rounds), state["X"], holder.ledger)
            return state["X"]
    else:
        raise ConfigurationError(f"unknown consensus method {method!r}")
    k = 0
    err = err0
    while err > target and not budget.spent(k, holder.ledger):
        X = step()
        k += 1
        err = consensus_error(X)
        drift = max(drift, float(np.abs(X.mean(axis=0) - mean0).max()))
        rec(k, err, err)
    trace.meta["rounds"] = k
    trace.meta["mean_drift"] = drift
    trace.x = X.mean(axis=0)
    return rec.close()


def run_single(config: dict, seed: int) -> RunTrace:
    """Run ``config`` once with algorithm seed ``seed`` (problem data use the config seed)."""
    alg = config["algorithm"]
    name = alg["name"]
    params = dict(alg.get("params", {}))
    unknown = set(params) - _PARAMS[name]
    if unknown:
        raise ConfigurationError(f"unknown parameters for {name}: {sorted(unknown)}")
    budget = build_budget(config)
    record = config.get("record")
    if name == "consensus":
        return _consensus(config, budget, params, seed, record)
    if "problem" not in config:
        raise ConfigurationError(f"{name} needs a problem")
    problem = build_problem(config)
    x0 = start_point(config, problem.n)
    comp = build_compressor(config)
    if name == "sgd":
        return opt.sgd(problem, x0, _step(params, "schedule"), budget, seed=seed,
                       averaging=params.get("averaging"), record=record, fast=params.get("fast", True))
    if name == "accelerated_gradient":
        return opt.accelerated_gradient(problem, x0, L=params.get("L"), mu=params.get("mu"), budget=budget,
                                        batch=params.get("batch"), seed=seed,
                                        distributed=params.get("distributed"), record=record)
    if name == "variance_reduced":
        return opt.variance_reduced(problem, x0, budget, seed=seed, L=params.get("L"), mu=params.get("mu"),
                                    anchor_batch=params.get("anchor_batch"), record=record)
    if name in ("gradient_sliding", "gradient_free_sliding"):
        term = _term(params.get("term"))
        R, optimum = _sliding_radius(problem, term, x0, params.get("R"))
        eps = params.get("eps", budget.target_eps or 1e-3)
        if name == "gradient_sliding":
            return opt.gradient_sliding(problem, term, x0, eps=eps, R=R, L=params.get("L"), M=params.get("M"),
                                        optimum=optimum, budget=budget, record=record)
        tau = params.get("tau")
        cfg = zo.SmoothingConfig(tau=tau) if tau is not None else None
        return zo.gradient_free_sliding(problem, term, x0, eps=eps, R=R, config=cfg, L=params.get("L"),
                                        M=params.get("M"), optimum=optimum, budget=budget, seed=seed,
                                        record=record)
    if name == "decentralized_sgd":
        return opt.decentralized_sgd(problem, build_schedule(config), x0, step=_step(params, "step"), budget=budget,
                                     local_steps=params.get("local_steps", 1), compressor=comp, seed=seed,
                                     consensus_step=params.get("consensus_step"), record=record)
    if name == "decentralized_accelerated":
        return opt.decentralized_accelerated(problem, build_schedule(config), x0,
                                             eps=params.get("eps", budget.target_eps or 1e-6), budget=budget,
                                             L=params.get("L"), mu=params.get("mu"), delta=params.get("delta"),
                                             batch=params.get("batch"), seed=seed, record=record)
    if name == "local_sgd":
        return opt.local_sgd(problem, x0, K=params.get("K", 10), T=params.get("T", 10), step=_step(params, "step"), seed=seed,
                             record=record, fast=params.get("fast", True))
    if name == "compressed_distributed_sgd":
        if comp is None:
            raise ConfigurationError("compressed_distributed_sgd needs a compressor")
        return opt.compressed_distributed_sgd(problem, comp, x0, step=_step(params, "step"), budget=budget, seed=seed,
                                              topology=params.get("topology", "star"), record=record)
    cfg = zo.SmoothingConfig(tau=params["tau"]) if "tau" in params else None
    return zo.zo_sgd(problem, x0, cfg, _step(params, "schedule"), budget,
                     seed=seed, record=record)


def _aggregate(traces):
    common = set(r.round for r in traces[0].records)
    for tr in traces[1:]:
        common &= {r.round for r in tr.records}
    rounds = sorted(common)
    values = []
    for tr in traces:
        by_round = {r.round: r.subopt for r in tr.records}
        values.append([by_round[k] for k in rounds])
    return {"round": np.array(rounds, dtype=np.int64), "subopt_mean": np.mean(np.array(values), axis=0)}


def run_experiment(config: dict) -> ExperimentResult:
    """Validate ``config`` and run every repeat.

    Divergence and budget errors propagate with their partial traces.
    """
    validate(config)
    seeds = repeat_seeds(config["seed"], config.get("repeats", 1))
    traces = [run_single(config, s) for s in seeds]
    for tr, s in zip(traces, seeds):
        tr.meta.setdefault("seed", s)
    return ExperimentResult(config=config, seeds=seeds, traces=traces, aggregate=_aggregate(traces))
