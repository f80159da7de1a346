"""Overlapping patch grid and tiered nuclei-density patch selection.

Patches are laid on a plain row-major grid (no edge-clamped extras); the
whole-image blue metric picks how many of the densest qualified patches are
kept. A stroma-dominated image with zero qualified patches still yields one
patch (the densest candidate) so downstream voting is always defined.
"""

from __future__ import annotations

import enum
import json
from dataclasses import dataclass

from .bluemask import MaskConfig, blue_fraction, require_same_shape
from .errors import TooSmallError
from .raster import BlueMask, RegionRect, RgbRaster

DEFAULT_PATCH_SIZE = 299
# floor(299/2): guarantees >= 50% overlap between adjacent patches.
DEFAULT_STRIDE = 149


class Tier(enum.Enum):
    """Patch budget implied by the whole-image blue metric."""

    KEEP_ALL = "keep_all"
    TOP10 = "top10"
    TOP5 = "top5"
    TOP1 = "top1"


@dataclass(frozen=True)
class PatchSpec:
    """A candidate patch: grid placement plus its blue-density score."""

    origin: RegionRect
    blue_density: float
    grid_index: tuple[int, int]  # (row, col) in scan order


@dataclass(frozen=True)
class SelectionReport:
    """Outcome of tiered selection for one image.

    ``selected`` is sorted by blue_density descending, ties broken by
    row-major grid order, and is never empty.
    """

    image_blue_metric: float
    tier: Tier
    candidates_total: int
    candidates_qualified: int
    selected: tuple[PatchSpec, ...]

    def to_record(self) -> dict:
        """Structured record: tier, metric and each patch's (x, y, density)."""
        return {
            "image_blue_metric": self.image_blue_metric,
            "tier": self.tier.value,
            "candidates_total": self.candidates_total,
            "candidates_qualified": self.candidates_qualified,
            "selected": [
                {
                    "x": p.origin.x,
                    "y": p.origin.y,
                    "size": p.origin.w,
                    "row": p.grid_index[0],
                    "col": p.grid_index[1],
                    "density": p.blue_density,
                }
                for p in self.selected
            ],
        }

    def to_json(self) -> str:
        return json.dumps(self.to_record(), sort_keys=True)


def grid_candidates(
    width: int,
    height: int,
    patch_size: int = DEFAULT_PATCH_SIZE,
    stride: int = DEFAULT_STRIDE,
) -> list[RegionRect]:
    """Row-major origins (c*stride, r*stride) of all fully-inside patches.

    Raises:
        TooSmallError: image smaller than the patch in either dimension.
    """
    if stride < 1:
        raise ValueError(f"stride must be >= 1, got {stride}")
    if patch_size < 1:
        raise ValueError(f"patch_size must be >= 1, got {patch_size}")
    if width < patch_size or height < patch_size:
        raise TooSmallError(
            f"image {width}x{height} is smaller than patch size {patch_size}"
        )
    rects = []
    for row in range((height - patch_size) // stride + 1):
        for col in range((width - patch_size) // stride + 1):
            rects.append(RegionRect(col * stride, row * stride, patch_size, patch_size))
    return rects


def select_patches(
    raster: RgbRaster,
    mask: BlueMask,
    config: MaskConfig = MaskConfig(),
    patch_size: int = DEFAULT_PATCH_SIZE,
    stride: int = DEFAULT_STRIDE,
) -> SelectionReport:
    """Apply the tiered nuclei-density selection policy.

    Candidates with blue_density > patch_blue_min qualify and are ranked by
    density (descending, grid order on ties). The whole-image metric picks
    the budget: above the first tier bound everything qualified is kept,
    then the three tier_counts caps apply. With zero qualified candidates
    the single densest candidate is selected regardless of the patch rule.

    Raises:
        DimensionError: mask does not match raster dimensions.
        TooSmallError: propagated from grid_candidates.
    """
    require_same_shape(raster, mask)
    metric = blue_fraction(mask)
    rects = grid_candidates(raster.width, raster.height, patch_size, stride)
    n_cols = (raster.width - patch_size) // stride + 1
    candidates = [
        PatchSpec(rect, blue_fraction(mask, rect), divmod(i, n_cols))
        for i, rect in enumerate(rects)
    ]

    qualified = [p for p in candidates if p.blue_density > config.patch_blue_min]
    # Stable sort keeps row-major scan order among equal densities.
    ranked = sorted(qualified, key=lambda p: -p.blue_density)

    b_all, b_10, b_5 = config.image_tier_bounds
    n_10, n_5, n_1 = config.tier_counts
    if metric > b_all:
        tier, cap = Tier.KEEP_ALL, None
    elif metric > b_10:
        tier, cap = Tier.TOP10, n_10
    elif metric > b_5:
        tier, cap = Tier.TOP5, n_5
    else:
        tier, cap = Tier.TOP1, n_1

    if ranked:
        selected = tuple(ranked) if cap is None else tuple(ranked[:cap])
    else:
        # Fallback: keep voting defined even for stroma-only images.
        selected = (max(candidates, key=lambda p: p.blue_density),)

    return SelectionReport(
        image_blue_metric=metric,
        tier=tier,
        candidates_total=len(candidates),
        candidates_qualified=len(qualified),
        selected=selected,
    )
