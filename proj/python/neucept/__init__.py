"""Critical-neuron discovery and mechanism clustering."""

from ._core import (
    ConfigError,
    DataError,
    NumericalError,
    binarize_at_median,
    cluster,
    clusters_entropy,
    discover,
    discrete_cni,
    empirical_mi,
    knockoff_threshold,
    knockoffs,
    label_entropy,
    linear_gaussian_case,
    sample_covariance,
    select,
    solve_equi_s,
    statistic,
    synth_trace,
)

__all__ = [
    "ConfigError",
    "DataError",
    "NumericalError",
    "binarize_at_median",
    "cluster",
    "clusters_entropy",
    "discover",
    "discrete_cni",
    "empirical_mi",
    "knockoff_threshold",
    "knockoffs",
    "label_entropy",
    "linear_gaussian_case",
    "sample_covariance",
    "select",
    "solve_equi_s",
    "statistic",
    "synth_trace",
]
