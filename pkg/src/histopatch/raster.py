"""Image and mask representation, decoding/encoding and region views.

Rasters are thin immutable wrappers around ``(h, w, 3)`` uint8 numpy arrays;
masks wrap ``(h, w)`` bool arrays. Every downstream stage (masking, tiling,
augmentation, classification, overlay rendering) works on these two types.
"""

from __future__ import annotations

import io
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np
from PIL import Image, UnidentifiedImageError

from .errors import BoundsError, DecodeError, DimensionError

# Physical pixel pitch of the target microscopy images (micrometers/pixel).
DEFAULT_PIXEL_PITCH_UM = 0.42

# 16-bit grayscale modes that Pillow may hand back; rescaled by keeping the
# high byte (deterministic, documented behavior for out-of-spec inputs).
_SIXTEEN_BIT_MODES = ("I;16", "I;16B", "I;16L", "I;16N")


@dataclass(frozen=True, eq=False)
class RgbRaster:
    """8-bit-per-channel RGB image.

    Args:
        pixels: ``(height, width, 3)`` uint8 array, row-major.
        pixel_pitch_um: physical pixel size in micrometers.
    """

    pixels: np.ndarray = field(repr=False)
    pixel_pitch_um: float = DEFAULT_PIXEL_PITCH_UM

    def __post_init__(self):
        arr = np.asarray(self.pixels)
        if arr.ndim != 3 or arr.shape[2] != 3:
            raise DimensionError(f"expected (h, w, 3) pixel array, got shape {arr.shape}")
        if arr.shape[0] < 1 or arr.shape[1] < 1:
            raise DimensionError(f"zero-dimension raster: shape {arr.shape}")
        if arr.dtype != np.uint8:
            if arr.size and (arr.min() < 0 or arr.max() > 255):
                raise ValueError("channel values outside [0, 255]")
            arr = arr.astype(np.uint8)
        else:
            arr = arr.copy()
        arr.setflags(write=False)
        object.__setattr__(self, "pixels", arr)

    @property
    def width(self) -> int:
        return self.pixels.shape[1]

    @property
    def height(self) -> int:
        return self.pixels.shape[0]

    def __eq__(self, other) -> bool:
        if not isinstance(other, RgbRaster):
            return NotImplemented
        return (
            self.pixels.shape == other.pixels.shape
            and bool(np.array_equal(self.pixels, other.pixels))
        )

    def __hash__(self):
        return hash((self.pixels.shape, self.pixels.tobytes()))


@dataclass(frozen=True, eq=False)
class BlueMask:
    """Boolean raster marking bluish (nuclei-stained) pixels."""

    bits: np.ndarray = field(repr=False)

    def __post_init__(self):
        arr = np.asarray(self.bits)
        if arr.ndim != 2:
            raise DimensionError(f"expected (h, w) bit array, got shape {arr.shape}")
        if arr.shape[0] < 1 or arr.shape[1] < 1:
            raise DimensionError(f"zero-dimension mask: shape {arr.shape}")
        arr = arr.astype(bool)
        arr.setflags(write=False)
        object.__setattr__(self, "bits", arr)

    @property
    def width(self) -> int:
        return self.bits.shape[1]

    @property
    def height(self) -> int:
        return self.bits.shape[0]

    def __eq__(self, other) -> bool:
        if not isinstance(other, BlueMask):
            return NotImplemented
        return (
            self.bits.shape == other.bits.shape
            and bool(np.array_equal(self.bits, other.bits))
        )


@dataclass(frozen=True)
class RegionRect:
    """Axis-aligned pixel rectangle: origin (x, y), size (w, h)."""

    x: int
    y: int
    w: int
    h: int

    def __post_init__(self):
        if self.x < 0 or self.y < 0:
            raise BoundsError(f"negative region origin ({self.x}, {self.y})", region=self)
        if self.w < 1 or self.h < 1:
            raise DimensionError(f"degenerate region size {self.w}x{self.h}")

    @property
    def area(self) -> int:
        return self.w * self.h

    def fits(self, width: int, height: int) -> bool:
        return self.x + self.w <= width and self.y + self.h <= height


def check_region(region: RegionRect, width: int, height: int) -> None:
    """Raise BoundsError unless ``region`` lies fully inside width x height."""
    if not region.fits(width, height):
        raise BoundsError(
            f"region x={region.x} y={region.y} w={region.w} h={region.h} "
            f"exceeds raster bounds {width}x{height}",
            region=region,
            width=width,
            height=height,
        )


def decode_image(data: bytes) -> RgbRaster:
    """Decode encoded image bytes into an 8-bit RGB raster.

    Alpha channels are dropped (not blended); 16-bit grayscale is rescaled
    by truncating to the high byte.

    Raises:
        DecodeError: malformed or unsupported input bytes.
        DimensionError: decoded image has a zero dimension.
    """
    fmt = "unknown"
    try:
        img = Image.open(io.BytesIO(data))
        fmt = img.format or "unknown"
        img.load()
    except UnidentifiedImageError as exc:
        raise DecodeError(f"unrecognized image format: {exc}") from exc
    except Exception as exc:  # Pillow raises OSError/ValueError on truncation
        raise DecodeError(f"failed to decode {fmt} image: {exc}") from exc
    if img.width < 1 or img.height < 1:
        raise DimensionError(f"zero-dimension image {img.width}x{img.height} ({fmt})")
    if img.mode in _SIXTEEN_BIT_MODES:
        gray = (np.asarray(img, dtype=np.uint16) >> 8).astype(np.uint8)
        arr = np.stack([gray] * 3, axis=-1)
    else:
        if img.mode != "RGB":
            img = img.convert("RGB")
        arr = np.asarray(img, dtype=np.uint8)
    return RgbRaster(arr)


def encode_image(raster: RgbRaster, format: str = "PNG") -> bytes:
    """Encode a raster; PNG is lossless and round-trips bit-exactly."""
    img = Image.fromarray(raster.pixels, mode="RGB")
    buf = io.BytesIO()
    img.save(buf, format=format)
    return buf.getvalue()


def load_image(path: str | Path) -> RgbRaster:
    try:
        data = Path(path).read_bytes()
    except OSError as exc:
        raise DecodeError(f"cannot read image file {path}: {exc}") from exc
    return decode_image(data)


def save_image(raster: RgbRaster, path: str | Path) -> None:
    path = Path(path)
    fmt = {"jpg": "JPEG", "jpeg": "JPEG", "tif": "TIFF", "tiff": "TIFF"}.get(
        path.suffix.lower().lstrip("."), "PNG"
    )
    path.write_bytes(encode_image(raster, format=fmt))


def save_mask(mask: BlueMask, path: str | Path) -> None:
    """Write a mask as an 8-bit grayscale image (255 = bluish)."""
    img = Image.fromarray(mask.bits.astype(np.uint8) * 255, mode="L")
    img.save(Path(path), format="PNG")


def crop(raster: RgbRaster, region: RegionRect) -> RgbRaster:
    """Return the w x h sub-raster at ``region``; pixel (i, j) of the result
    equals source pixel (x+i, y+j).

    Raises:
        BoundsError: region extends outside the raster.
    """
    check_region(region, raster.width, raster.height)
    view = raster.pixels[region.y : region.y + region.h, region.x : region.x + region.w]
    return RgbRaster(np.ascontiguousarray(view), pixel_pitch_um=raster.pixel_pitch_um)
