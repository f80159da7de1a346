"""Shared test utilities: independent oracles and raster builders.

Every oracle here is deliberately written as a plain loop or enumeration,
independent of the vectorized/production code path it checks.
"""

from __future__ import annotations

import numpy as np

from histopatch.classify import CLASS_ORDER, ClassLabel
from histopatch.raster import RgbRaster


def random_raster(rng: np.random.Generator, width: int, height: int) -> RgbRaster:
    return RgbRaster(rng.integers(0, 256, size=(height, width, 3), dtype=np.uint8))


def mask_oracle(raster: RgbRaster, threshold: float) -> np.ndarray:
    """Per-pixel brute-force bluish test: blue > threshold * red."""
    h, w = raster.height, raster.width
    out = np.zeros((h, w), dtype=bool)
    pixels = raster.pixels
    for i in range(h):
        for j in range(w):
            r = int(pixels[i, j, 0])
            b = int(pixels[i, j, 2])
            out[i, j] = b > threshold * r
    return out


def blue_fraction_oracle(bits: np.ndarray, x: int, y: int, w: int, h: int) -> float:
    count = 0
    for i in range(y, y + h):
        for j in range(x, x + w):
            if bits[i, j]:
                count += 1
    return count / (w * h)


def grid_oracle(width: int, height: int, patch: int, stride: int) -> list[tuple[int, int]]:
    """Exhaustive enumeration of valid origins, row-major."""
    xs = [x for x in range(width) if x % stride == 0 and x + patch <= width]
    ys = [y for y in range(height) if y % stride == 0 and y + patch <= height]
    return [(x, y) for y in ys for x in xs]


def selection_oracle(
    densities: list[float],
    metric: float,
    patch_blue_min: float,
    tier_bounds: tuple[float, float, float],
    tier_counts: tuple[int, int, int],
) -> list[int]:
    """Qualify, sort, take-k over candidate ordinals; the tiler's contract.

    Returns selected candidate indices in output order. Implements the
    fallback: zero qualified -> single densest candidate.
    """
    qualified = [i for i, d in enumerate(densities) if d > patch_blue_min]
    ranked = sorted(qualified, key=lambda i: (-densities[i], i))
    b_all, b_10, b_5 = tier_bounds
    if metric > b_all:
        cap = None
    elif metric > b_10:
        cap = tier_counts[0]
    elif metric > b_5:
        cap = tier_counts[1]
    else:
        cap = tier_counts[2]
    if not ranked:
        best = max(range(len(densities)), key=lambda i: (densities[i], -i))
        return [best]
    return ranked if cap is None else ranked[:cap]


def vote_oracle(labels: list[ClassLabel]) -> ClassLabel:
    """Count then walk the precedence order."""
    counts = {label: 0 for label in CLASS_ORDER}
    for label in labels:
        counts[label] += 1
    best = max(counts.values())
    for label in (
        ClassLabel.INVASIVE,
        ClassLabel.IN_SITU,
        ClassLabel.BENIGN,
        ClassLabel.NORMAL,
    ):
        if counts[label] == best:
            return label
    raise AssertionError("unreachable")


def rot90_oracle(arr: np.ndarray, quarter_turns: int) -> np.ndarray:
    """Counterclockwise axis-permutation rotation, written as index loops."""
    out = arr
    for _ in range(quarter_turns % 4):
        h, w = out.shape[:2]
        nxt = np.empty((w, h) + out.shape[2:], dtype=out.dtype)
        for i in range(w):
            for j in range(h):
                nxt[i, j] = out[j, w - 1 - i]
        out = nxt
    return out


# The 100 image-level (predicted, actual) pairs behind the published
# four-class matrix: rows predicted, columns actual, order
# normal, benign, insitu, invasive.
FOUR_CLASS_TABLE = (
    (20, 1, 3, 0),
    (4, 23, 1, 1),
    (1, 1, 20, 2),
    (0, 0, 1, 22),
)

# Published two-class matrix: rows predicted, columns actual,
# order non-carcinoma, carcinoma.
TWO_CLASS_TABLE = (
    (48, 5),
    (2, 45),
)


def table_pairs(table) -> list[tuple[int, int]]:
    """(predicted_index, actual_index) pairs encoded by a count matrix."""
    pairs = []
    for p, row in enumerate(table):
        for a, count in enumerate(row):
            pairs.extend([(p, a)] * count)
    return pairs
