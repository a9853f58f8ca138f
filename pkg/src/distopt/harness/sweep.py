"""Parameter grids and log-log slope fits over their results."""

from __future__ import annotations

import itertools
import math
import os
import traceback
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field

import numpy as np

from ..errors import ConfigurationError
from .config import get_path, set_path, validate
from .runner import ExperimentResult, run_experiment

__all__ = ["SlopeFit", "fit_slope", "SweepCell", "SweepResult", "sweep", "expand_grid", "metric", "thread_count"]

THREADS_ENV = "DISTOPT_THREADS"


@dataclass(frozen=True)
class SlopeFit:
    """Least-squares slope of ``log y`` against ``log x`` with its standard error."""

    x_name: str
    y_name: str
    slope: float
    stderr: float
    points: int
    intercept: float = 0.0

    def within(self, target: float, tol: float) -> bool:
        return abs(self.slope - target) <= tol

    def to_dict(self) -> dict:
        return dict(self.__dict__)


def fit_slope(x, y, x_name: str = "x", y_name: str = "y") -> SlopeFit:
    """Fit ``log y = a + s log x``; needs at least three positive points."""
    x = np.asarray(x, dtype=float)
    y = np.asarray(y, dtype=float)
    if x.shape != y.shape or x.ndim != 1:
        raise ConfigurationError("x and y must be 1-D arrays of equal length")
    if x.size < 3:
        raise ConfigurationError("a slope fit needs at least three points")
    if np.any(x <= 0) or np.any(y <= 0):
        raise ConfigurationError("log-log fit needs positive data")
    lx, ly = np.log(x), np.log(y)
    design = np.column_stack([np.ones_like(lx), lx])
    coef, *_ = np.linalg.lstsq(design, ly, rcond=None)
    resid = ly - design @ coef
    dof = x.size - 2
    sxx = float(((lx - lx.mean()) ** 2).sum())
    if sxx == 0:
        raise ConfigurationError("x values must not all coincide")
    stderr = math.sqrt(float(resid @ resid) / dof / sxx) if dof > 0 else 0.0
    return SlopeFit(x_name, y_name, float(coef[1]), stderr, int(x.size), float(coef[0]))


def metric(result: ExperimentResult, name: str) -> float:
    """Scalar summary of an experiment, averaged over repeats.

    ``final.<column>``: column of the last record.
    ``reach.<column>@<eps>``: column at the first record with subopt <= eps.
    ``meta.<key>``: trace metadata.  ``config.<dotted.path>``: config value.
    """
    kind, _, rest = name.partition(".")
    if kind == "config":
        return float(get_path(result.config, rest))
    if kind == "meta":
        return float(np.mean([tr.meta[rest] for tr in result.traces]))
    if kind == "final":
        return float(np.mean([tr.column(rest)[-1] for tr in result.traces]))
    if kind == "reach":
        column, _, eps = rest.partition("@")
        vals = [tr.first_reaching(float(eps), column) for tr in result.traces]
        if any(v is None for v in vals):
            raise ConfigurationError(f"target {eps} not reached")
        return float(np.mean(vals))
    raise ConfigurationError(f"unknown metric {name!r}")


@dataclass
class SweepCell:
    config: dict
    result: ExperimentResult | None = None
    error: str | None = None


@dataclass
class SweepResult:
    cells: list
    fits: list = field(default_factory=list)
    skipped: list = field(default_factory=list)

    @property
    def traces(self) -> list:
        return [tr for c in self.cells if c.result is not None for tr in c.result.traces]

    def to_dict(self) -> dict:
        return {
            "cells": [{"config": c.config, "error": c.error} for c in self.cells],
            "fits": [f.to_dict() for f in self.fits],
            "skipped": self.skipped,
        }


def expand_grid(spec: dict) -> list:
    """Configs for the product of ``spec["vary"]`` (dotted path -> values) applied to ``spec["base"]``."""
    base = spec["base"]
    vary = spec.get("vary", {})
    keys = list(vary)
    out = []
    for values in itertools.product(*(vary[k] for k in keys)):
        cfg = base
        for k, v in zip(keys, values):
            cfg = set_path(cfg, k, v)
        out.append(cfg)
    return out


def thread_count() -> int:
    return max(1, int(os.environ.get(THREADS_ENV, "1")))


def _run_cell(config):
    try:
        validate(config)
        return SweepCell(config, run_experiment(config))
    except Exception as exc:  # every failure is recorded and the sweep goes on
        return SweepCell(config, error=f"{type(exc).__name__}: {exc}\n{traceback.format_exc()}")


def sweep(spec, fits=None) -> SweepResult:
    """Run a grid and fit the requested slopes.

    ``spec`` is either a list of configs or ``{"base", "vary", "fits"}``;
    each fit is ``{"x": metric, "y": metric}`` (see :func:`metric`).  Cells
    run on ``DISTOPT_THREADS`` worker threads; results keep grid order.
    Fits with fewer than three successful cells are skipped.
    """
    if isinstance(spec, dict):
        configs = expand_grid(spec)
        fits = spec.get("fits", []) if fits is None else fits
    else:
        configs = list(spec)
        fits = fits or []
    workers = thread_count()
    if workers > 1:
        with ThreadPoolExecutor(workers) as pool:
            cells = list(pool.map(_run_cell, configs))
    else:
        cells = [_run_cell(c) for c in configs]
    out = SweepResult(cells)
    ok = [c for c in cells if c.result is not None]
    for f in fits:
        if len(ok) < 3:
            out.skipped.append({"fit": f, "reason": f"{len(ok)} successful cells"})
            continue
        try:
            xs = [metric(c.result, f["x"]) for c in ok]
            ys = [metric(c.result, f["y"]) for c in ok]
            out.fits.append(fit_slope(xs, ys, f["x"], f["y"]))
        except ConfigurationError as exc:
            out.skipped.append({"fit": f, "reason": str(exc)})
    return out
