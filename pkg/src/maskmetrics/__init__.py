"""Overlap and surface-distance metrics for 3D multi-label segmentations.

Reads MetaImage (.mhd/.mha) and NIfTI-1 (.nii/.nii.gz) volumes, compares
a prediction against a reference per label, and reports dice, jaccard,
precision, recall, specificity, accuracy, fpr, fnr, vs plus hd, hd95,
msd, mdsd, stdsd, with all five distance metrics sharing one distance
transform per direction.
"""

from .errors import (
    DataSizeMismatch,
    DimsMismatch,
    EmptySurface,
    InvalidSpacing,
    MalformedHeader,
    MaskMetricsError,
    MixedMode,
    NoMatches,
    NonIntegerLabels,
    SchemaMismatch,
    SpacingMismatch,
    UnknownMetric,
    UnsupportedDatatype,
    UnsupportedFormat,
)
from .evaluator import (
    DISTANCE_METRICS,
    METRIC_NAMES,
    OVERLAP_METRICS,
    EvaluationRequest,
    MetricRecord,
    ResolvedPair,
    evaluate_pair,
    resolve_pairs,
    write_metrics,
)
from .image_io import (
    SUPPORTED_SUFFIXES,
    ImageFormat,
    LabelVolume,
    VolumeHeader,
    detect_format,
    load_metaimage,
    load_nifti,
    load_volume,
)
from .overlap import (
    BinaryMaskPair,
    ConfusionCounts,
    accuracy,
    binarize,
    confusion,
    dice,
    fnr,
    fpr,
    jaccard,
    precision,
    recall,
    specificity,
    volume_similarity,
)
from .report import write_csv
from .surface import (
    BorderMask,
    DistanceMap,
    SurfaceDistanceSet,
    directed_distances,
    distance_transform,
    distance_transform_runs,
    extract_border,
    hausdorff,
    hausdorff95,
    mean_surface_distance,
    median_surface_distance,
    reset_distance_transform_runs,
    std_surface_distance,
    surface_distance_set,
)

__version__ = "1.0.0"

__all__ = [
    "BinaryMaskPair",
    "BorderMask",
    "ConfusionCounts",
    "DISTANCE_METRICS",
    "DataSizeMismatch",
    "DimsMismatch",
    "DistanceMap",
    "EmptySurface",
    "EvaluationRequest",
    "ImageFormat",
    "InvalidSpacing",
    "LabelVolume",
    "METRIC_NAMES",
    "MalformedHeader",
    "MaskMetricsError",
    "MetricRecord",
    "MixedMode",
    "NoMatches",
    "NonIntegerLabels",
    "OVERLAP_METRICS",
    "ResolvedPair",
    "SUPPORTED_SUFFIXES",
    "SchemaMismatch",
    "SpacingMismatch",
    "SurfaceDistanceSet",
    "UnknownMetric",
    "UnsupportedDatatype",
    "UnsupportedFormat",
    "VolumeHeader",
    "accuracy",
    "binarize",
    "confusion",
    "detect_format",
    "dice",
    "directed_distances",
    "distance_transform",
    "distance_transform_runs",
    "evaluate_pair",
    "extract_border",
    "fnr",
    "fpr",
    "hausdorff",
    "hausdorff95",
    "jaccard",
    "load_metaimage",
    "load_nifti",
    "load_volume",
    "mean_surface_distance",
    "median_surface_distance",
    "precision",
    "recall",
    "reset_distance_transform_runs",
    "resolve_pairs",
    "specificity",
    "std_surface_distance",
    "surface_distance_set",
    "volume_similarity",
    "write_csv",
    "write_metrics",
]
