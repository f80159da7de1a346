"""Exception types raised across the pipeline."""


class HistopatchError(Exception):
    """Base class for all errors raised by this package."""


class DecodeError(HistopatchError):
    """Image bytes could not be decoded (malformed or unsupported format)."""


class DimensionError(HistopatchError):
    """An image or mask has a degenerate (zero or negative) dimension."""


class BoundsError(HistopatchError):
    """A region does not lie fully inside the raster it is applied to."""

    def __init__(self, msg, *, region=None, width=None, height=None):
        super().__init__(msg)
        self.region = region
        self.width = width
        self.height = height


class TooSmallError(HistopatchError):
    """Image is smaller than the patch size in at least one dimension."""


class AugmentError(HistopatchError):
    """Augmentation spec violates its bounds (shift cap, rotation range)."""


class ShapeError(HistopatchError):
    """A patch does not match the shape a classifier backend expects."""


class BackendLoadError(HistopatchError):
    """A classifier backend could not be constructed (missing/corrupt model)."""


class ModelContractError(HistopatchError):
    """Model output violates the probability-vector contract."""


class EmptyVoteError(HistopatchError):
    """majority_vote received an empty label list."""


class ManifestError(HistopatchError):
    """Dataset manifest is malformed (duplicate paths, bad label/split)."""


class ManifestMismatchError(HistopatchError):
    """A predicted image id does not appear in the ground-truth manifest."""


class ConfigError(HistopatchError):
    """Run configuration violates the ranges declared by its owning types."""


class OverlayError(HistopatchError):
    """Selection report and raster passed to the renderer do not match."""
