"""Deterministic and seeded-random patch augmentation for training export.

Transforms apply in a fixed order: flips, then integer shift with reflect
padding, then rotation. Flips and shifts are exact (pure index permutations);
rotation uses bilinear resampling with reflect padding, except that exact
multiples of 90 degrees take the exact axis-permutation path so they stay
pixel-identical to their flip/transpose equivalents. Positive angles rotate
counterclockwise. Reflection duplicates the edge pixel (numpy 'symmetric').
"""

from __future__ import annotations

import hashlib
import struct
from dataclasses import dataclass

import cv2
import numpy as np

from .errors import AugmentError
from .raster import RgbRaster

# Shift is capped to a quarter of the patch so most tissue stays in frame.
SHIFT_CAP_DIVISOR = 4

_FLIP_COMBINATIONS = ((False, False), (True, False), (False, True), (True, True))


@dataclass(frozen=True)
class AugmentSpec:
    """One augmentation: flip set, pixel shift, rotation and seed provenance."""

    flip_horizontal: bool = False
    flip_vertical: bool = False
    shift: tuple[int, int] = (0, 0)  # (dx, dy), positive = right/down
    rotation_deg: float = 0.0
    seed: int = 0

    def __post_init__(self):
        if not -180.0 <= self.rotation_deg <= 180.0:
            raise AugmentError(f"rotation_deg must be in [-180, 180], got {self.rotation_deg}")

    @property
    def is_identity(self) -> bool:
        return (
            not self.flip_horizontal
            and not self.flip_vertical
            and self.shift == (0, 0)
            and self.rotation_deg == 0.0
        )


def _shift_reflect(arr: np.ndarray, dx: int, dy: int) -> np.ndarray:
    pad = max(abs(dx), abs(dy))
    padded = np.pad(arr, ((pad, pad), (pad, pad), (0, 0)), mode="symmetric")
    h, w = arr.shape[:2]
    return padded[pad - dy : pad - dy + h, pad - dx : pad - dx + w]


def _rotate(arr: np.ndarray, angle: float) -> np.ndarray:
    if angle % 90.0 == 0.0:
        return np.rot90(arr, int(round(angle / 90.0)) % 4)
    h, w = arr.shape[:2]
    matrix = cv2.getRotationMatrix2D(((w - 1) / 2.0, (h - 1) / 2.0), angle, 1.0)
    return cv2.warpAffine(
        arr, matrix, (w, h), flags=cv2.INTER_LINEAR, borderMode=cv2.BORDER_REFLECT
    )


def augment_patch(patch: RgbRaster, spec: AugmentSpec) -> RgbRaster:
    """Apply flips, then shift, then rotation; dimensions are preserved.

    Raises:
        AugmentError: non-square patch, or shift magnitude above size/4.
    """
    if patch.width != patch.height:
        raise AugmentError(f"patch must be square, got {patch.width}x{patch.height}")
    cap = patch.width // SHIFT_CAP_DIVISOR
    dx, dy = spec.shift
    if abs(dx) > cap or abs(dy) > cap:
        raise AugmentError(f"shift ({dx}, {dy}) exceeds cap {cap} for {patch.width}px patch")

    arr = patch.pixels
    if spec.flip_horizontal:
        arr = arr[:, ::-1]
    if spec.flip_vertical:
        arr = arr[::-1, :]
    if (dx, dy) != (0, 0):
        arr = _shift_reflect(arr, dx, dy)
    if spec.rotation_deg != 0.0:
        arr = _rotate(arr, spec.rotation_deg)
    return RgbRaster(np.ascontiguousarray(arr), pixel_pitch_um=patch.pixel_pitch_um)


def standard_augmentations(patch: RgbRaster, seed: int) -> list[RgbRaster]:
    """Emit the 8 training variants of a patch, deterministically from seed.

    Variants 0-3 are the four flip combinations (none, horizontal, vertical,
    both); variants 4-7 repeat them with a seeded random rotation in
    [-180, 180] and a seeded random shift within the cap.
    """
    variants = [augment_patch(patch, spec) for spec in standard_augmentation_specs(patch.width, seed)]
    return variants


def standard_augmentation_specs(patch_size: int, seed: int) -> list[AugmentSpec]:
    """The 8 AugmentSpecs behind standard_augmentations, for provenance logs."""
    rng = np.random.default_rng(seed & 0xFFFFFFFFFFFFFFFF)
    cap = patch_size // SHIFT_CAP_DIVISOR
    specs = [
        AugmentSpec(flip_horizontal=fh, flip_vertical=fv, seed=seed)
        for fh, fv in _FLIP_COMBINATIONS
    ]
    for fh, fv in _FLIP_COMBINATIONS:
        angle = float(rng.uniform(-180.0, 180.0))
        dx = int(rng.integers(-cap, cap + 1))
        dy = int(rng.integers(-cap, cap + 1))
        specs.append(
            AugmentSpec(
                flip_horizontal=fh,
                flip_vertical=fv,
                shift=(dx, dy),
                rotation_deg=angle,
                seed=seed,
            )
        )
    return specs


def variant_seed(base_seed: int, image_id: str, x: int, y: int) -> int:
    """Stable per-patch seed derived from the run seed and patch identity."""
    blob = image_id.encode("utf-8") + struct.pack("<qqq", base_seed, x, y)
    return int.from_bytes(hashlib.blake2b(blob, digest_size=8).digest(), "little")
