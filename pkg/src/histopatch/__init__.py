"""Nuclei-density patch extraction, classification and majority-vote
diagnosis for H&E breast-tissue images."""

from .aggregate import ImageDecision, majority_vote
from .augment import AugmentSpec, augment_patch, standard_augmentations
from .bluemask import MaskConfig, blue_fraction, compute_blue_mask
from .classify import (
    ClassLabel,
    ClassProbabilities,
    ModelBackend,
    PatchPrediction,
    StubBackend,
    argmax_label,
    classify_patch,
)
from .config import RunConfig, load_config
from .evaluate import (
    BinaryLabel,
    ConfusionMatrix,
    EvalReport,
    build_confusion,
    evaluate_run,
    to_binary,
)
from .manifest import DatasetManifest, ManifestEntry, load_manifest
from .raster import BlueMask, RegionRect, RgbRaster, crop, decode_image, encode_image
from .tiler import PatchSpec, SelectionReport, Tier, grid_candidates, select_patches

__version__ = "0.1.0"

__all__ = [
    "AugmentSpec",
    "BinaryLabel",
    "BlueMask",
    "ClassLabel",
    "ClassProbabilities",
    "ConfusionMatrix",
    "DatasetManifest",
    "EvalReport",
    "ImageDecision",
    "ManifestEntry",
    "MaskConfig",
    "ModelBackend",
    "PatchPrediction",
    "PatchSpec",
    "RegionRect",
    "RgbRaster",
    "RunConfig",
    "SelectionReport",
    "StubBackend",
    "Tier",
    "argmax_label",
    "augment_patch",
    "blue_fraction",
    "build_confusion",
    "classify_patch",
    "compute_blue_mask",
    "crop",
    "decode_image",
    "encode_image",
    "evaluate_run",
    "grid_candidates",
    "load_config",
    "load_manifest",
    "majority_vote",
    "select_patches",
    "standard_augmentations",
    "to_binary",
]
