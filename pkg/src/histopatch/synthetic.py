"""Synthetic H&E-look images for demos and end-to-end tests.

These are not tissue simulations; they only reproduce the two color
populations the pipeline cares about: eosin-pink background (never bluish
under the channel-ratio rule) and hematoxylin-blue nuclei dots (always
bluish), so selection behavior is fully controllable.
"""

from __future__ import annotations

from pathlib import Path

import numpy as np

from .classify import CLASS_ORDER
from .manifest import DatasetManifest, ManifestEntry, write_manifest
from .raster import RgbRaster, save_image

PINK = (233, 170, 200)   # blue = 200 < 1.587 * 233: never bluish
BLUE = (90, 60, 190)     # blue = 190 > 1.587 * 90: always bluish
WHITE = (255, 255, 255)


def flat_image(width: int, height: int, color=PINK) -> RgbRaster:
    arr = np.empty((height, width, 3), dtype=np.uint8)
    arr[:] = color
    return RgbRaster(arr)


def sprinkle_nuclei(
    arr: np.ndarray,
    rng: np.random.Generator,
    count: int,
    radius: int = 4,
    centers_box: tuple[int, int, int, int] | None = None,
) -> None:
    """Paint ``count`` blue discs; centers drawn inside ``centers_box``."""
    h, w = arr.shape[:2]
    x0, y0, x1, y1 = centers_box or (0, 0, w, h)
    yy, xx = np.ogrid[-radius : radius + 1, -radius : radius + 1]
    disc = (xx * xx + yy * yy) <= radius * radius
    for _ in range(count):
        cx = int(rng.integers(x0, x1))
        cy = int(rng.integers(y0, y1))
        ys = slice(max(cy - radius, 0), min(cy + radius + 1, h))
        xs = slice(max(cx - radius, 0), min(cx + radius + 1, w))
        sub = disc[
            ys.start - (cy - radius) : ys.stop - (cy - radius),
            xs.start - (cx - radius) : xs.stop - (cx - radius),
        ]
        arr[ys, xs][sub] = BLUE


def tissue_image(
    width: int, height: int, nuclei: int, seed: int, clusters: int = 0
) -> RgbRaster:
    """Pink background with seeded nuclei; optional clustered layout."""
    rng = np.random.default_rng(seed)
    arr = np.empty((height, width, 3), dtype=np.uint8)
    arr[:] = PINK
    if clusters > 0:
        per_cluster = max(1, nuclei // clusters)
        for _ in range(clusters):
            cx = int(rng.integers(0, width))
            cy = int(rng.integers(0, height))
            span = max(8, min(width, height) // 8)
            box = (
                max(cx - span, 0),
                max(cy - span, 0),
                min(cx + span, width),
                min(cy + span, height),
            )
            sprinkle_nuclei(arr, rng, per_cluster, radius=3, centers_box=box)
    else:
        sprinkle_nuclei(arr, rng, nuclei, radius=3)
    return RgbRaster(arr)


def block_grid_image(
    width: int,
    height: int,
    patch_size: int,
    stride: int,
    cells: list[tuple[int, int]],
    block: int,
    fill_border: bool = False,
) -> RgbRaster:
    """Blue square of side ``block`` centered in each named grid cell.

    With ``fill_border`` the right/bottom strips not covered by any grid
    candidate are painted solid blue, raising the whole-image metric without
    touching any candidate patch density.
    """
    arr = np.empty((height, width, 3), dtype=np.uint8)
    arr[:] = PINK
    for row, col in cells:
        x = col * stride + (patch_size - block) // 2
        y = row * stride + (patch_size - block) // 2
        arr[y : y + block, x : x + block] = BLUE
    if fill_border:
        n_cols = (width - patch_size) // stride + 1
        n_rows = (height - patch_size) // stride + 1
        x_edge = (n_cols - 1) * stride + patch_size
        y_edge = (n_rows - 1) * stride + patch_size
        arr[:, x_edge:] = BLUE
        arr[y_edge:, :] = BLUE
    return RgbRaster(arr)


# Class-flavored nuclei layouts (cosmetic; density rises with severity).
_CLASS_STYLES = {
    "normal": dict(nuclei=60, clusters=4),
    "benign": dict(nuclei=160, clusters=8),
    "insitu": dict(nuclei=320, clusters=6),
    "invasive": dict(nuclei=520, clusters=0),
}


def make_demo_dataset(
    out_dir: str | Path,
    per_class: int = 2,
    width: int = 320,
    height: int = 320,
    seed: int = 0,
) -> Path:
    """Write a small labeled synthetic dataset plus its manifest.

    Returns the manifest path. Images alternate train/validation splits.
    """
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    entries = []
    for label in CLASS_ORDER:
        style = _CLASS_STYLES[label.token]
        for i in range(per_class):
            img_seed = seed * 10_000 + label.value * 100 + i
            img = tissue_image(width, height, seed=img_seed, **style)
            name = f"{label.token}_{i:03d}.png"
            save_image(img, out / name)
            split = "train" if i % 2 == 0 else "validation"
            entries.append(
                ManifestEntry(path=str(out / name), label=label, split=split, format="png")
            )
    manifest_path = out / "manifest.csv"
    write_manifest(DatasetManifest(tuple(entries)), manifest_path)
    return manifest_path
