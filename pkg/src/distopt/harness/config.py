"""Experiment configuration: JSON schema validation and object builders."""

from __future__ import annotations

import copy
import json
from importlib import resources

import jsonschema
import numpy as np

from ..compressors import Compressor
from ..errors import ConfigurationError
from ..objectives import GaussianNoise, SubsampleNoise, logistic_problem, quadratic_problem, random_quadratic, regularize
from ..rng import stream
from ..topology import make_graph, random_schedule, static_schedule
from ..trace import RunBudget

__all__ = ["SCHEMA", "SCHEMA_VERSION", "validate", "load_config", "build_problem", "build_schedule",
           "build_budget", "build_compressor", "start_point", "set_path", "get_path"]

SCHEMA_VERSION = 1
SCHEMA = json.loads(resources.files(__package__).joinpath("schema.json").read_text())
_VALIDATOR = jsonschema.Draft7Validator(SCHEMA)


def validate(config: dict) -> dict:
    """Check ``config`` against the schema; raise ConfigurationError with every violation."""
    errors = sorted(_VALIDATOR.iter_errors(config), key=lambda e: list(e.path))
    if errors:
        lines = [f"{'/'.join(str(p) for p in e.path) or '<root>'}: {e.message}" for e in errors]
        raise ConfigurationError("invalid experiment config:\n  " + "\n  ".join(lines))
    budget = config["budget"]
    if not budget:
        raise ConfigurationError("budget needs at least one bound")
    return config


def load_config(path) -> dict:
    with open(path, encoding="utf-8") as fh:
        return validate(json.load(fh))


def get_path(config: dict, path: str):
    node = config
    for key in path.split("."):
        node = node[key]
    return node


def set_path(config: dict, path: str, value) -> dict:
    """Copy of ``config`` with the dotted ``path`` set to ``value``."""
    out = copy.deepcopy(config)
    node = out
    keys = path.split(".")
    for key in keys[:-1]:
        node = node.setdefault(key, {})
    node[keys[-1]] = value
    return out


def _noise(spec):
    if spec is None:
        return None
    if spec["kind"] == "gaussian":
        return GaussianNoise(spec["sigma2"])
    return SubsampleNoise()


_QUAD_KEYS = ("nodes", "components", "dim", "L", "mu", "spectrum", "spread", "R", "rotate")
_LOGISTIC_KEYS = ("nodes", "components", "dim", "samples", "l2", "flip")


def build_problem(config: dict):
    """Problem from ``config["problem"]``; random data come from ``stream(seed, "problem")``."""
    spec = config["problem"]
    kind = spec["kind"]
    noise = _noise(spec.get("noise"))
    rng = stream(config["seed"], "problem")
    if kind == "random_quadratic":
        kw = {k: spec[k] for k in _QUAD_KEYS if k in spec}
        problem = random_quadratic(rng, noise=noise, **kw)
    elif kind == "logistic":
        kw = {k: spec[k] for k in _LOGISTIC_KEYS if k in spec}
        problem = logistic_problem(rng, noise=noise, **kw)
    else:
        if "A" not in spec or "b" not in spec:
            raise ConfigurationError("quadratic problem needs A and b")
        problem = quadratic_problem(np.array(spec["A"], dtype=float), np.array(spec["b"], dtype=float),
                                    spec.get("c", 0.0), noise=noise)
    if "regularize" in spec:
        reg = spec["regularize"]
        problem = regularize(problem, start_point(config, problem.n), reg["eps"], reg["R"])
    return problem


def start_point(config: dict, n: int) -> np.ndarray:
    x0 = config.get("x0", "zeros")
    if isinstance(x0, str):
        return np.zeros(n)
    x0 = np.array(x0, dtype=float)
    if x0.shape != (n,):
        raise ConfigurationError(f"x0 has length {x0.size}, problem dimension is {n}")
    return x0


def build_schedule(config: dict):
    spec = config.get("topology")
    if spec is None:
        raise ConfigurationError(f"{config['algorithm']['name']} needs a topology")
    kind = spec.get("schedule", "static")
    if kind == "random":
        if spec["kind"] != "erdos_renyi" or "p" not in spec:
            raise ConfigurationError("random schedules draw Erdos-Renyi graphs; set kind and p")
        return random_schedule(spec["m"], spec["p"], seed=config["seed"], pool=spec.get("pool", 8))
    graph = make_graph(spec["kind"], spec["m"], p=spec.get("p"), seed=config["seed"])
    return static_schedule(graph)


def build_budget(config: dict) -> RunBudget:
    return RunBudget(**config["budget"])


def build_compressor(config: dict):
    spec = config.get("compressor")
    if spec is None:
        return None
    return Compressor(spec["kind"], spec.get("k"))
