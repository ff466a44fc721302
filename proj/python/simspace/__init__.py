"""Similarity spaces: SMACOF MDS, distance correlations and grouped regression."""

from ._core import (
    IDENTITY_SHUFFLE_SEED,
    SimspaceError,
    block_downscale,
    correlation_analysis,
    dimension_sweep,
    evaluate,
    evaluate_stress,
    fit_distance_weights,
    fit_lasso,
    fit_linear,
    fit_mds,
    fractional_ranks,
    grouped_cross_validation,
    load_image,
    nnls,
    normalize_configuration,
    pairwise_distances,
    pava,
    pearson,
    spearman,
)

__all__ = [
    "IDENTITY_SHUFFLE_SEED",
    "SimspaceError",
    "block_downscale",
    "correlation_analysis",
    "dimension_sweep",
    "evaluate",
    "evaluate_stress",
    "fit_distance_weights",
    "fit_lasso",
    "fit_linear",
    "fit_mds",
    "fractional_ranks",
    "grouped_cross_validation",
    "load_image",
    "nnls",
    "normalize_configuration",
    "pairwise_distances",
    "pava",
    "pearson",
    "spearman",
]
