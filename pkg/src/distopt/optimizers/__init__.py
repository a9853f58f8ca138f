"""Optimization methods; every one returns a :class:`~distopt.trace.RunTrace`."""

from .accelerated import accelerated_gradient, stm_certificate
from .compressed import compressed_distributed_sgd
from .decentralized import decentralized_accelerated, decentralized_sgd
from .local import local_sgd, local_sgd_step
from .sgd import sgd
from .sliding import (
    L1Term,
    NonsmoothTerm,
    composite_optimum,
    gradient_sliding,
    sliding_inner_steps,
    sliding_outer_steps,
)
from .variance_reduction import katyusha_parameters, variance_reduced

__all__ = [
    "sgd",
    "accelerated_gradient",
    "stm_certificate",
    "variance_reduced",
    "katyusha_parameters",
    "gradient_sliding",
    "NonsmoothTerm",
    "L1Term",
    "composite_optimum",
    "sliding_outer_steps",
    "sliding_inner_steps",
    "decentralized_sgd",
    "decentralized_accelerated",
    "local_sgd",
    "local_sgd_step",
    "compressed_distributed_sgd",
]
