"""Simulation library for distributed and decentralized convex optimization.

Problems, graphs, averaging protocols, compression operators and
optimizers, with every oracle call and communication round counted so that
complexity laws can be measured from run traces.
"""

from . import compressors, consensus, kernels, objectives, optimizers, topology, zeroth_order
from .errors import (
    BudgetExceeded,
    ConfigurationError,
    DistOptError,
    DivergenceError,
    TopologyError,
    UnsupportedCombination,
)
from .objectives import GaussianNoise, Problem, SmoothnessProfile, SubsampleNoise
from .trace import RunBudget, RunTrace, StepSchedule

__version__ = "0.1.0"

__all__ = [
    "compressors",
    "consensus",
    "kernels",
    "objectives",
    "optimizers",
    "topology",
    "zeroth_order",
    "Problem",
    "SmoothnessProfile",
    "GaussianNoise",
    "SubsampleNoise",
    "RunBudget",
    "RunTrace",
    "StepSchedule",
    "DistOptError",
    "ConfigurationError",
    "TopologyError",
    "UnsupportedCombination",
    "BudgetExceeded",
    "DivergenceError",
]
