"""Exception types shared across the package."""


class MaskMetricsError(Exception):
    """Base class for every error this package raises on purpose."""


class UnsupportedFormat(MaskMetricsError):
    """File suffix does not map to a supported image format."""


class MalformedHeader(MaskMetricsError):
    """Image header is missing required fields or fails its magic check."""


class UnsupportedDatatype(MaskMetricsError):
    """Image stores voxels in a scalar type this package does not read."""


class DataSizeMismatch(MaskMetricsError):
    """Voxel payload length does not match the header geometry."""


class NonIntegerLabels(MaskMetricsError):
    """Voxel values cannot be read as non-negative integer labels."""


class InvalidSpacing(MaskMetricsError):
    """Voxel spacing must be three positive finite numbers."""


class DimsMismatch(MaskMetricsError):
    """Two grids that must share a shape do not."""


class SpacingMismatch(MaskMetricsError):
    """Ground-truth and prediction voxel spacings disagree."""


class EmptySurface(MaskMetricsError):
    """A surface-distance operand has no voxels, so no border exists."""

    def __init__(self, side, message=None):
        self.side = side
        super().__init__(message or f"{side} mask is empty, surface distances are undefined")


class MixedMode(MaskMetricsError):
    """Ground-truth and prediction paths are not both files or both directories."""


class NoMatches(MaskMetricsError):
    """Two directories share no supported image filenames."""


class UnknownMetric(MaskMetricsError):
    """A requested metric name is not recognized."""


class SchemaMismatch(MaskMetricsError):
    """CSV rows being written do not match the header already on disk."""
