"""Bluish-pixel masking and blue-density metrics.

A pixel counts as bluish when its blue channel exceeds a fixed ratio of its
red channel; hematoxylin-stained nuclei are the tissue this selects for.
The comparison is written in multiplication form (``blue > t * red``) so a
red channel of zero needs no special casing: red=0 is bluish iff blue > 0.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import ConfigError, DimensionError
from .raster import BlueMask, RegionRect, RgbRaster, check_region

# Blue/red intensity ratio separating nuclei-stained from stroma pixels;
# tuned on H&E training images.
DEFAULT_RATIO_THRESHOLD = 1.587

# Minimum bluish fraction for a patch to qualify for scoring.
DEFAULT_PATCH_BLUE_MIN = 0.02

# Whole-image bluish-fraction boundaries and the patch budget below each:
# metric > 1% keeps every qualified patch; then 10, 5 and 1.
DEFAULT_IMAGE_TIER_BOUNDS = (0.01, 0.005, 0.001)
DEFAULT_TIER_COUNTS = (10, 5, 1)


@dataclass(frozen=True)
class MaskConfig:
    """Thresholds driving mask computation and patch selection."""

    ratio_threshold: float = DEFAULT_RATIO_THRESHOLD
    patch_blue_min: float = DEFAULT_PATCH_BLUE_MIN
    image_tier_bounds: tuple[float, float, float] = DEFAULT_IMAGE_TIER_BOUNDS
    tier_counts: tuple[int, int, int] = DEFAULT_TIER_COUNTS

    def __post_init__(self):
        if not self.ratio_threshold > 0:
            raise ConfigError(f"ratio_threshold must be > 0, got {self.ratio_threshold}")
        if not 0 <= self.patch_blue_min <= 1:
            raise ConfigError(f"patch_blue_min must be in [0, 1], got {self.patch_blue_min}")
        bounds = tuple(self.image_tier_bounds)
        if len(bounds) != 3 or not all(0 < b < 1 for b in bounds):
            raise ConfigError(f"image_tier_bounds must be three fractions in (0, 1), got {bounds}")
        if not (bounds[0] > bounds[1] > bounds[2]):
            raise ConfigError(f"image_tier_bounds must be strictly decreasing, got {bounds}")
        counts = tuple(self.tier_counts)
        if len(counts) != 3 or not all(c >= 1 for c in counts):
            raise ConfigError(f"tier_counts must be three integers >= 1, got {counts}")
        if not (counts[0] > counts[1] > counts[2]):
            raise ConfigError(f"tier_counts must be strictly decreasing, got {counts}")
        object.__setattr__(self, "image_tier_bounds", bounds)
        object.__setattr__(self, "tier_counts", counts)


def compute_blue_mask(raster: RgbRaster, config: MaskConfig = MaskConfig()) -> BlueMask:
    """Mark every pixel with blue > ratio_threshold * red.

    Channel values are integers <= 255, so the double-precision product is
    well inside exact range; strict inequality is used at the boundary.
    """
    red = raster.pixels[:, :, 0].astype(np.float64)
    blue = raster.pixels[:, :, 2].astype(np.float64)
    return BlueMask(blue > config.ratio_threshold * red)


def blue_fraction(mask: BlueMask, region: RegionRect | None = None) -> float:
    """Fraction of bluish pixels in ``region`` (whole mask when omitted).

    The whole-mask call is the image-level blue density metric that picks
    the selection tier.

    Raises:
        BoundsError: region extends outside the mask.
    """
    if region is None:
        bits = mask.bits
        area = mask.width * mask.height
    else:
        check_region(region, mask.width, mask.height)
        bits = mask.bits[region.y : region.y + region.h, region.x : region.x + region.w]
        area = region.area
    return int(np.count_nonzero(bits)) / area


def require_same_shape(raster: RgbRaster, mask: BlueMask) -> None:
    if (raster.height, raster.width) != (mask.height, mask.width):
        raise DimensionError(
            f"mask {mask.width}x{mask.height} does not match raster "
            f"{raster.width}x{raster.height}"
        )
