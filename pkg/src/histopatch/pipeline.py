"""Pipeline orchestration: mask, select, classify, vote, persist, evaluate.

Per-image work fans out to a bounded thread pool; records are written in
manifest order regardless of completion order, so a fixed seed plus the
stub backend makes whole runs byte-reproducible.
"""

from __future__ import annotations

import json
from concurrent.futures import ThreadPoolExecutor
from pathlib import Path
from typing import Sequence

from .aggregate import majority_vote
from .augment import augment_patch, standard_augmentation_specs, variant_seed
from .bluemask import compute_blue_mask
from .classify import (
    Backend,
    ClassLabel,
    ModelBackend,
    PatchPrediction,
    StubBackend,
    argmax_label,
    classify_patch,
)
from .config import RunConfig
from .errors import HistopatchError, ManifestError
from .evaluate import EvalReport, ImageOutcome, evaluate_run, render_tables
from .manifest import DatasetManifest, ManifestEntry
from .overlay import OverlayStyle, render_overlay
from .raster import RegionRect, RgbRaster, crop, load_image, save_image, save_mask
from .tiler import SelectionReport, grid_candidates, select_patches

RESULTS_FILENAME = "results.jsonl"
REPORT_FILENAME = "eval_report.json"
TABLES_FILENAME = "tables.txt"
TRAINING_MANIFEST_FILENAME = "generation_manifest.jsonl"


def make_backend(config: RunConfig) -> Backend:
    """Build the configured classifier backend (stub or serialized model)."""
    if config.backend == "stub":
        return StubBackend(constant=config.stub_constant, salt=config.seed)
    return ModelBackend(config.backend, config.model_meta)


def process_image(
    entry: ManifestEntry, config: RunConfig, backend: Backend
) -> dict:
    """Run one image through mask -> select -> classify -> vote.

    Returns a result record; failures are captured as status="failed"
    records rather than raised, so one bad file never aborts a batch.
    """
    try:
        raster = load_image(entry.path)
        mask = compute_blue_mask(raster, config.mask)
        report = select_patches(
            raster, mask, config.mask, config.patch_size, config.stride
        )
        predictions = classify_selection(raster, report, backend)
        decision = majority_vote([p.label for p in predictions])
        record = {
            "image": entry.path,
            "status": "ok",
            "label": entry.label.token if entry.label else "unknown",
            "tier": report.tier.value,
            "image_blue_metric": report.image_blue_metric,
            "candidates_total": report.candidates_total,
            "candidates_qualified": report.candidates_qualified,
            "n_patches": decision.n_patches,
            "decision": decision.label.token,
            "tie_broken": decision.tie_broken,
            "vote_counts": decision.to_record()["vote_counts"],
            "patches": [
                {
                    "x": p.patch.origin.x,
                    "y": p.patch.origin.y,
                    "size": p.patch.origin.w,
                    "density": p.patch.blue_density,
                    "label": p.label.token,
                    "probs": list(p.probs.values),
                }
                for p in predictions
            ],
        }
        return record
    except Exception as exc:  # record per-image failures, never abort the batch
        kind = type(exc).__name__ if not isinstance(exc, HistopatchError) else ""
        message = f"{kind}: {exc}" if kind else str(exc)
        return {"image": entry.path, "status": "failed", "error": message}


def classify_selection(
    raster: RgbRaster, report: SelectionReport, backend: Backend
) -> list[PatchPrediction]:
    predictions = []
    for spec in report.selected:
        probs = classify_patch(backend, crop(raster, spec.origin))
        predictions.append(PatchPrediction.from_probs(spec, probs))
    return predictions


def replay_decision(record: dict, config: RunConfig, backend: Backend) -> str:
    """Re-run classification on a record's patch origins; returns the label."""
    raster = load_image(record["image"])
    labels = []
    for patch in record["patches"]:
        region = RegionRect(patch["x"], patch["y"], patch["size"], patch["size"])
        probs = classify_patch(backend, crop(raster, region))
        labels.append(argmax_label(probs))
    return majority_vote(labels).label.token


def run_pipeline(
    manifest: DatasetManifest, config: RunConfig, out_dir: str | Path
) -> tuple[list[dict], EvalReport | None, int]:
    """Process every manifest entry; persist records and the eval report.

    Returns (records, report-or-None, exit_code); exit code is 0 iff every
    image processed without error.
    """
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    backend = make_backend(config)

    if config.workers == 1:
        records = [process_image(e, config, backend) for e in manifest.entries]
    else:
        with ThreadPoolExecutor(max_workers=config.workers) as pool:
            records = list(
                pool.map(lambda e: process_image(e, config, backend), manifest.entries)
            )

    write_records(records, out / RESULTS_FILENAME)

    report = None
    truth = manifest.labels()
    outcomes = [
        ImageOutcome(
            image_id=r["image"],
            decision=ClassLabel.from_token(r["decision"]),
            patch_labels=tuple(ClassLabel.from_token(p["label"]) for p in r["patches"]),
        )
        for r in records
        if r["status"] == "ok" and truth.get(r["image"]) is not None
    ]
    if outcomes:
        report = evaluate_run(outcomes, truth)
        (out / REPORT_FILENAME).write_text(
            json.dumps(report.to_record(), indent=2, sort_keys=True) + "\n"
        )
        (out / TABLES_FILENAME).write_text(render_tables(report))

    exit_code = 0 if all(r["status"] == "ok" for r in records) else 1
    return records, report, exit_code


def write_records(records: Sequence[dict], path: Path) -> None:
    lines = [json.dumps(r, sort_keys=True) for r in records]
    path.write_text("\n".join(lines) + "\n")


def write_mask_outputs(
    image_path: str | Path, config: RunConfig, out_dir: str | Path
) -> tuple[Path, Path]:
    """Write the bluish mask and the accepted/rejected overlay for one image."""
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    raster = load_image(image_path)
    mask = compute_blue_mask(raster, config.mask)
    report = select_patches(raster, mask, config.mask, config.patch_size, config.stride)
    candidates = grid_candidates(
        raster.width, raster.height, config.patch_size, config.stride
    )
    overlay = render_overlay(raster, report, candidates=candidates, style=OverlayStyle())
    stem = Path(image_path).stem
    mask_path = out / f"{stem}_mask.png"
    overlay_path = out / f"{stem}_overlay.png"
    save_mask(mask, mask_path)
    save_image(overlay, overlay_path)
    return mask_path, overlay_path


def export_training(
    manifest: DatasetManifest, config: RunConfig, out_dir: str | Path
) -> tuple[int, Path]:
    """Write selected patches and their 8 augmentations per class directory.

    Files land in ``<out>/<class>/<stem>_<x>_<y>_v<k>.png`` with a JSONL
    generation manifest (source image, patch origin, variant, seed). Output
    is a pure function of (manifest, config), so reruns are byte-identical.

    Raises:
        ManifestError: any entry lacks a class label.
    """
    unlabeled = [e.path for e in manifest.entries if e.label is None]
    if unlabeled:
        raise ManifestError(
            f"export requires labels for every entry; unlabeled: {unlabeled}"
        )
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    gen_entries = []
    n_files = 0
    for entry in manifest.entries:
        raster = load_image(entry.path)
        mask = compute_blue_mask(raster, config.mask)
        report = select_patches(
            raster, mask, config.mask, config.patch_size, config.stride
        )
        class_dir = out / entry.label.token
        class_dir.mkdir(exist_ok=True)
        stem = Path(entry.path).stem
        for spec in report.selected:
            patch = crop(raster, spec.origin)
            seed = variant_seed(config.seed, entry.path, spec.origin.x, spec.origin.y)
            var_specs = standard_augmentation_specs(patch.width, seed)
            for k, var_spec in enumerate(var_specs):
                variant = augment_patch(patch, var_spec)
                name = f"{stem}_{spec.origin.x}_{spec.origin.y}_v{k}.png"
                save_image(variant, class_dir / name)
                n_files += 1
                gen_entries.append(
                    {
                        "file": f"{entry.label.token}/{name}",
                        "source": entry.path,
                        "x": spec.origin.x,
                        "y": spec.origin.y,
                        "variant": k,
                        "seed": seed,
                        "flip_horizontal": var_spec.flip_horizontal,
                        "flip_vertical": var_spec.flip_vertical,
                        "shift": list(var_spec.shift),
                        "rotation_deg": var_spec.rotation_deg,
                    }
                )
    gen_path = out / TRAINING_MANIFEST_FILENAME
    write_records(gen_entries, gen_path)
    return n_files, gen_path
