"""Magnitude functions of finite metric spaces and embedding quality measures.

The magnitude of a finite metric space counts its "effective number of
points" at a given zoom level; evaluated across scales it yields the
magnitude function. This package computes magnitude and its weight
vectors via Cholesky solves, locates convergence scales, builds
re-scaled profiles, and derives two dissimilarities between spaces -
the profile difference and the aligned weight difference - alongside
classical embedding quality baselines.
"""

from .baselines import (
    NeighborhoodSpec,
    QualityReport,
    continuity,
    neighbourhood_loss,
    rmse_distances,
    spearman_distance_correlation,
    trustworthiness,
)
from .convergence import ConvergencePoint, ConvergenceSpec, find_convergence_scale
from .datasets import (
    circles,
    gaussian_blobs,
    laplace_noise,
    planets_dataset,
    swiss_roll,
)
from .errors import (
    CardinalityMismatch,
    DegenerateInput,
    DegenerateSpace,
    DuplicatePoints,
    GridMismatch,
    InvalidScale,
    MagnifyError,
    NoConvergence,
    NotPositiveDefinite,
    NumericalError,
    SingularMatrix,
    ValidationError,
    ZeroDiameter,
)
from .experiments import (
    RankingConfig,
    StabilityResult,
    ranking_experiment,
    stability_experiment,
)
from .io import RunConfig
from .magnitude import (
    MagnitudeResult,
    SimilarityMatrix,
    magnitude_and_weights,
    magnitude_function,
    magnitude_naive_oracle,
    similarity_matrix,
)
from .metric import (
    DistanceMatrix,
    MetricKind,
    PointCloud,
    ValidationReport,
    deduplicate,
    normalize_by_diameter,
    pairwise_distances,
    validate_distance_matrix,
)
from .profiles import (
    EvaluationGrid,
    IntegrationMethod,
    MagnitudeProfile,
    WeightProfile,
    magnitude_profile_difference,
    magnitude_weight_difference,
    per_point_weight_deviation,
    rescaled_profile,
)

__version__ = "0.1.0"

__all__ = [
    "CardinalityMismatch",
    "ConvergencePoint",
    "ConvergenceSpec",
    "DegenerateInput",
    "DegenerateSpace",
    "DistanceMatrix",
    "DuplicatePoints",
    "EvaluationGrid",
    "GridMismatch",
    "IntegrationMethod",
    "InvalidScale",
    "MagnifyError",
    "MagnitudeProfile",
    "MagnitudeResult",
    "MetricKind",
    "NeighborhoodSpec",
    "NoConvergence",
    "NotPositiveDefinite",
    "NumericalError",
    "PointCloud",
    "QualityReport",
    "RankingConfig",
    "RunConfig",
    "SimilarityMatrix",
    "SingularMatrix",
    "StabilityResult",
    "ValidationError",
    "ValidationReport",
    "WeightProfile",
    "ZeroDiameter",
    "circles",
    "continuity",
    "deduplicate",
    "find_convergence_scale",
    "gaussian_blobs",
    "laplace_noise",
    "magnitude_and_weights",
    "magnitude_function",
    "magnitude_naive_oracle",
    "magnitude_profile_difference",
    "magnitude_weight_difference",
    "neighbourhood_loss",
    "normalize_by_diameter",
    "pairwise_distances",
    "per_point_weight_deviation",
    "planets_dataset",
    "ranking_experiment",
    "rescaled_profile",
    "rmse_distances",
    "similarity_matrix",
    "spearman_distance_correlation",
    "stability_experiment",
    "swiss_roll",
    "trustworthiness",
    "validate_distance_matrix",
]
