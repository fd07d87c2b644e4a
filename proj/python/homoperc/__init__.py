"""Homological percolation on cubical and permutohedral tori."""

from ._homoperc import (
    Model,
    betti_numbers,
    critical_pair,
    duality_audit,
    effective_field,
    run_experiment,
    run_trials,
    validate,
)

__all__ = [
    "Model",
    "betti_numbers",
    "critical_pair",
    "duality_audit",
    "effective_field",
    "run_experiment",
    "run_trials",
    "validate",
]
