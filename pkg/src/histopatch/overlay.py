"""Static overlay rendering: mask view plus accepted/rejected patch boxes.

Output is a downscaled copy of the source with rectangle outlines drawn at
patch boundaries; accepted patches get the accepted color (or per-class
colors when predictions are supplied), remaining grid candidates the
rejected color. Pixels outside box outlines are never touched.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .classify import ClassLabel
from .errors import ConfigError, OverlayError
from .raster import RegionRect, RgbRaster
from .tiler import SelectionReport

Color = tuple[int, int, int]

DEFAULT_CLASS_COLORS: dict[ClassLabel, Color] = {
    ClassLabel.NORMAL: (60, 180, 75),      # green
    ClassLabel.BENIGN: (255, 225, 25),     # yellow
    ClassLabel.IN_SITU: (245, 130, 48),    # orange
    ClassLabel.INVASIVE: (230, 25, 75),    # red
}


@dataclass(frozen=True)
class OverlayStyle:
    accepted_color: Color = (0, 255, 0)
    rejected_color: Color = (255, 0, 0)
    class_colors: dict[ClassLabel, Color] = field(
        default_factory=lambda: dict(DEFAULT_CLASS_COLORS)
    )
    line_thickness: int = 2
    downscale: int = 4

    def __post_init__(self):
        if self.downscale < 1:
            raise ConfigError(f"downscale must be >= 1, got {self.downscale}")
        if self.line_thickness < 1:
            raise ConfigError(f"line_thickness must be >= 1, got {self.line_thickness}")
        if self.accepted_color == self.rejected_color:
            raise ConfigError("accepted and rejected colors must be distinct")
        if len(set(self.class_colors.values())) != len(self.class_colors):
            raise ConfigError("per-class colors must be pairwise distinct")


def scaled_box(region: RegionRect, downscale: int) -> tuple[int, int, int, int]:
    """Outline bounds (x0, y0, x1, y1) inclusive, in downscaled coordinates."""
    x0 = region.x // downscale
    y0 = region.y // downscale
    x1 = (region.x + region.w - 1) // downscale
    y1 = (region.y + region.h - 1) // downscale
    return x0, y0, x1, y1


def _draw_box(img: np.ndarray, box: tuple[int, int, int, int], color: Color, thickness: int):
    h, w = img.shape[:2]
    x0, y0, x1, y1 = box
    x0c, y0c = max(x0, 0), max(y0, 0)
    x1c, y1c = min(x1, w - 1), min(y1, h - 1)
    if x0c > x1c or y0c > y1c:
        return
    t = thickness
    img[y0c : min(y0c + t, y1c + 1), x0c : x1c + 1] = color          # top
    img[max(y1c - t + 1, y0c) : y1c + 1, x0c : x1c + 1] = color      # bottom
    img[y0c : y1c + 1, x0c : min(x0c + t, x1c + 1)] = color          # left
    img[y0c : y1c + 1, max(x1c - t + 1, x0c) : x1c + 1] = color      # right


def render_overlay(
    raster: RgbRaster,
    report: SelectionReport,
    candidates: list[RegionRect] | None = None,
    predictions: list[ClassLabel] | None = None,
    style: OverlayStyle = OverlayStyle(),
) -> RgbRaster:
    """Draw the selection onto a downscaled copy of the image.

    ``candidates``, when given, are the full grid; candidates that were not
    selected are outlined in the rejected color. ``predictions`` (aligned
    with ``report.selected``) switch accepted outlines to per-class colors.

    Raises:
        OverlayError: report does not belong to the raster (patch out of
            bounds) or predictions misaligned with the selection.
    """
    for patch in report.selected:
        if not patch.origin.fits(raster.width, raster.height):
            raise OverlayError(
                f"selected patch at ({patch.origin.x}, {patch.origin.y}) exceeds "
                f"raster {raster.width}x{raster.height}"
            )
    if predictions is not None and len(predictions) != len(report.selected):
        raise OverlayError(
            f"{len(predictions)} predictions for {len(report.selected)} selected patches"
        )

    d = style.downscale
    out = np.ascontiguousarray(raster.pixels[::d, ::d]).copy()

    selected_origins = {(p.origin.x, p.origin.y) for p in report.selected}
    if candidates is not None:
        for rect in candidates:
            if (rect.x, rect.y) in selected_origins:
                continue
            _draw_box(out, scaled_box(rect, d), style.rejected_color, style.line_thickness)

    for i, patch in enumerate(report.selected):
        if predictions is not None:
            color = style.class_colors[predictions[i]]
        else:
            color = style.accepted_color
        _draw_box(out, scaled_box(patch.origin, d), color, style.line_thickness)

    return RgbRaster(out, pixel_pitch_um=raster.pixel_pitch_um * d)
