"""Feature detection, exposure-adaptive merging, description and registration."""

from .descriptors import describe, log_contrast, match
from .harris import detect_harris, detect_stack, harris_response
from .merging import (adaptive_weights, feature_counts, feature_distribution,
                      merge_features, optimal_exposure, region_of, weighted_response)
from .registration import estimate_transform, fit_affine, fit_homography, reprojection_errors
from .types import ExposureWeightMatrix, Feature, FeatureSet

__all__ = [
    "describe", "log_contrast", "match",
    "detect_harris", "detect_stack", "harris_response",
    "adaptive_weights", "feature_counts", "feature_distribution",
    "merge_features", "optimal_exposure", "region_of", "weighted_response",
    "estimate_transform", "fit_affine", "fit_homography", "reprojection_errors",
    "ExposureWeightMatrix", "Feature", "FeatureSet",
]
