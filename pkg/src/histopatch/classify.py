"""Patch-level 4-class scoring behind a pluggable backend boundary.

The backend contract is one call: square RGB patch in, probability 4-vector
out. ``StubBackend`` is a pure function of the patch bytes and its
configuration, so the whole pipeline is testable with no model artifacts;
``ModelBackend`` executes a serialized network graph (TorchScript) with the
preprocessing recorded in its sidecar metadata, preventing train/infer skew.
"""

from __future__ import annotations

import enum
import hashlib
import json
from dataclasses import dataclass
from pathlib import Path
from typing import Protocol, Sequence

import numpy as np

from .errors import BackendLoadError, ModelContractError, ShapeError
from .raster import RgbRaster
from .tiler import PatchSpec

# Accepted drift of a probability vector's sum from 1 (model-runtime noise).
PROBABILITY_SUM_TOLERANCE = 1e-6


class ClassLabel(enum.Enum):
    """The four diagnostic classes.

    Enum values are the softmax index order fixed by the model export
    metadata (Normal=0 .. Invasive=3). Tie-breaking uses ``precedence``:
    rank 0 (Invasive) outranks all, so ties never understate the more
    dangerous disease.
    """

    NORMAL = 0
    BENIGN = 1
    IN_SITU = 2
    INVASIVE = 3

    @property
    def precedence(self) -> int:
        """0 = Invasive (highest), 1 = InSitu, 2 = Benign, 3 = Normal."""
        return 3 - self.value

    @property
    def token(self) -> str:
        return _LABEL_TOKENS[self]

    @classmethod
    def from_token(cls, token: str) -> "ClassLabel":
        key = token.strip().lower().replace("_", "").replace(" ", "").replace("-", "")
        try:
            return _TOKEN_LABELS[key]
        except KeyError:
            raise ValueError(f"unknown class label {token!r}") from None


_LABEL_TOKENS = {
    ClassLabel.NORMAL: "normal",
    ClassLabel.BENIGN: "benign",
    ClassLabel.IN_SITU: "insitu",
    ClassLabel.INVASIVE: "invasive",
}
_TOKEN_LABELS = {v: k for k, v in _LABEL_TOKENS.items()}

CLASS_ORDER = (ClassLabel.NORMAL, ClassLabel.BENIGN, ClassLabel.IN_SITU, ClassLabel.INVASIVE)


@dataclass(frozen=True)
class ClassProbabilities:
    """Softmax distribution over the four classes, indexed by ClassLabel."""

    values: tuple[float, float, float, float]

    def __post_init__(self):
        vals = tuple(float(v) for v in self.values)
        if len(vals) != 4:
            raise ModelContractError(f"expected 4 probabilities, got {len(vals)}")
        if any(v < 0 for v in vals):
            raise ModelContractError(f"negative probability in {vals}")
        total = sum(vals)
        if abs(total - 1.0) > PROBABILITY_SUM_TOLERANCE:
            raise ModelContractError(f"probabilities sum to {total!r}, not 1")
        object.__setattr__(self, "values", vals)

    @classmethod
    def from_raw(cls, raw: Sequence[float]) -> "ClassProbabilities":
        """Validate a raw model output vector; renormalize in-tolerance noise.

        Raises:
            ModelContractError: wrong length, negative entries, or a sum
                deviating from 1 by more than the tolerance.
        """
        vals = [float(v) for v in raw]
        if len(vals) != 4:
            raise ModelContractError(f"model output has length {len(vals)}, expected 4")
        if any(v < 0 for v in vals):
            raise ModelContractError(f"model output has negative entries: {vals}")
        total = sum(vals)
        if abs(total - 1.0) > PROBABILITY_SUM_TOLERANCE:
            raise ModelContractError(f"model output sums to {total!r}, outside 1 +/- 1e-6")
        return cls(tuple(v / total for v in vals))

    def p(self, label: ClassLabel) -> float:
        return self.values[label.value]

    def as_dict(self) -> dict[str, float]:
        return {label.token: self.values[label.value] for label in CLASS_ORDER}


def argmax_label(probs: ClassProbabilities) -> ClassLabel:
    """Label of the maximal probability; exact ties go to higher precedence."""
    best = max(probs.values)
    tied = [label for label in CLASS_ORDER if probs.values[label.value] == best]
    return min(tied, key=lambda label: label.precedence)


@dataclass(frozen=True)
class PatchPrediction:
    """Joins a selected patch to its classifier output."""

    patch: PatchSpec
    probs: ClassProbabilities
    label: ClassLabel

    @classmethod
    def from_probs(cls, patch: PatchSpec, probs: ClassProbabilities) -> "PatchPrediction":
        return cls(patch=patch, probs=probs, label=argmax_label(probs))


class Backend(Protocol):
    """Classifier backend: square RGB patch in, probability 4-vector out.

    Implementations must be safe to call concurrently on distinct patches
    (pure functions or internally synchronized) and must either accept any
    square patch (``expected_size`` None) or declare the side length they
    require.
    """

    expected_size: int | None

    def predict(self, patch: RgbRaster) -> ClassProbabilities: ...


class StubBackend:
    """Deterministic test backend, a pure function of patch bytes.

    With ``constant`` set, every patch maps to that distribution. Otherwise
    probabilities are derived from a BLAKE2 digest of the pixel bytes, so
    outputs are bitwise reproducible across runs and platforms but still
    vary between patches.
    """

    expected_size: int | None = None

    def __init__(self, constant: Sequence[float] | None = None, salt: int = 0):
        self.constant = ClassProbabilities.from_raw(constant) if constant is not None else None
        self.salt = int(salt)

    def predict(self, patch: RgbRaster) -> ClassProbabilities:
        if self.constant is not None:
            return self.constant
        digest = hashlib.blake2b(
            patch.pixels.tobytes(),
            digest_size=32,
            salt=self.salt.to_bytes(8, "little", signed=False),
        ).digest()
        weights = [1 + int.from_bytes(digest[8 * i : 8 * i + 8], "little") for i in range(4)]
        total = sum(weights)
        return ClassProbabilities.from_raw([w / total for w in weights])


class ModelBackend:
    """Runs a serialized network graph (.pt2 exported program).

    The sidecar metadata record (``<model>.meta.json`` by default) fixes the
    input scaling, channel order and class index order; patches are scaled
    exactly as at training time before the forward pass.
    """

    def __init__(self, model_path: str | Path, meta_path: str | Path | None = None):
        model_path = Path(model_path)
        meta_path = Path(meta_path) if meta_path else model_path.with_suffix(model_path.suffix + ".meta.json")
        try:
            import torch
        except ImportError as exc:
            raise BackendLoadError(
                "the model backend needs the optional 'torch' dependency "
                "(pip install histopatch[model])"
            ) from exc
        if not model_path.exists():
            raise BackendLoadError(f"model file not found: {model_path}")
        if not meta_path.exists():
            raise BackendLoadError(f"model metadata not found: {meta_path}")
        try:
            meta = json.loads(meta_path.read_text())
        except (OSError, json.JSONDecodeError) as exc:
            raise BackendLoadError(f"unreadable model metadata {meta_path}: {exc}") from exc
        self._meta = _validate_metadata(meta, meta_path)
        try:
            self._module = torch.export.load(str(model_path)).module()
        except Exception as exc:
            raise BackendLoadError(f"cannot load model graph {model_path}: {exc}") from exc
        self._torch = torch
        self.expected_size = int(self._meta["input"]["size"])
        inp = self._meta["input"]
        self._scale = float(inp["scale"])
        self._mean = np.asarray(inp["mean"], dtype=np.float32)
        self._std = np.asarray(inp["std"], dtype=np.float32)

    def predict(self, patch: RgbRaster) -> ClassProbabilities:
        arr = patch.pixels.astype(np.float32) * self._scale
        arr = (arr - self._mean) / self._std
        tensor = self._torch.from_numpy(np.ascontiguousarray(arr.transpose(2, 0, 1))[None])
        with self._torch.inference_mode():
            out = self._module(tensor)
        vec = out.detach().cpu().numpy().reshape(-1)
        return ClassProbabilities.from_raw(vec.tolist())


def _validate_metadata(meta: dict, path: Path) -> dict:
    try:
        inp = meta["input"]
        out = meta["output"]
        size = int(inp["size"])
        layout = inp["layout"]
        channels = inp["channel_order"]
        float(inp["scale"])
        mean, std = list(inp["mean"]), list(inp["std"])
        classes = [str(c) for c in out["classes"]]
    except (KeyError, TypeError, ValueError) as exc:
        raise BackendLoadError(f"malformed model metadata {path}: {exc}") from exc
    if size < 1:
        raise BackendLoadError(f"bad input size {size} in {path}")
    if layout != "NCHW" or channels != "RGB":
        raise BackendLoadError(f"unsupported layout/channel order {layout}/{channels} in {path}")
    if len(mean) != 3 or len(std) != 3:
        raise BackendLoadError(f"mean/std must have 3 entries in {path}")
    expected = [label.token for label in CLASS_ORDER]
    if classes != expected:
        raise BackendLoadError(f"class order {classes} != required {expected} in {path}")
    return meta


def classify_patch(backend: Backend, patch: RgbRaster) -> ClassProbabilities:
    """Score one patch through a backend, enforcing the shape contract.

    Raises:
        ShapeError: patch is not square RGB, or does not match the side
            length the backend declares (299 for the shipped model export).
        ModelContractError: backend output violates the probability contract.
    """
    if patch.width != patch.height:
        raise ShapeError(f"patch must be square, got {patch.width}x{patch.height}")
    expected = getattr(backend, "expected_size", None)
    if expected is not None and (patch.width, patch.height) != (expected, expected):
        raise ShapeError(
            f"backend expects {expected}x{expected} patches, got {patch.width}x{patch.height}"
        )
    return backend.predict(patch)
