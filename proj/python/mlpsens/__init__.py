"""Analytic input sensitivities of multilayer perceptrons."""

from ._core import (
    DivergenceError,
    Error,
    IoError,
    Network,
    UnsupportedStructureError,
    ValidationError,
    analyze,
    garson,
    generate_seasonal_demand,
    generate_simdata,
    init_weights,
    jacobian_at,
    kde,
    load_model,
    network_from_flat,
    olden,
    run_cli,
    save_model,
    sensitivities,
    summarize,
    train,
    validate_network,
)

__all__ = [
    "DivergenceError",
    "Error",
    "IoError",
    "Network",
    "UnsupportedStructureError",
    "ValidationError",
    "analyze",
    "garson",
    "generate_seasonal_demand",
    "generate_simdata",
    "init_weights",
    "jacobian_at",
    "kde",
    "load_model",
    "network_from_flat",
    "olden",
    "run_cli",
    "save_model",
    "sensitivities",
    "summarize",
    "train",
    "validate_network",
]
