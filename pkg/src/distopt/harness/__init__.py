"""Experiment configuration, execution, sweeps, slope fits and export."""

from .config import SCHEMA, SCHEMA_VERSION, load_config, validate
from .export import export, read_json, trace_csv, write_csv, write_json
from .runner import ALGORITHMS, ExperimentResult, run_experiment
from .sweep import SlopeFit, SweepResult, fit_slope, sweep

__all__ = [
    "SCHEMA",
    "SCHEMA_VERSION",
    "validate",
    "load_config",
    "run_experiment",
    "ExperimentResult",
    "ALGORITHMS",
    "sweep",
    "SweepResult",
    "SlopeFit",
    "fit_slope",
    "export",
    "trace_csv",
    "write_csv",
    "write_json",
    "read_json",
]
