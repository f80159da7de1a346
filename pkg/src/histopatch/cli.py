"""Command-line entry points.

Subcommands: mask, extract, export-training, infer, evaluate, pipeline.
Every run is configured by one JSON file (see RunConfig); the flags below
override the file. Exit code 0 means every image processed without error.
"""

from __future__ import annotations

import argparse
import dataclasses
import json
import sys
from pathlib import Path

from . import pipeline as pl
from .classify import ClassLabel
from .config import CONFIG_ENV_VAR, RunConfig, load_config
from .errors import HistopatchError
from .evaluate import ImageOutcome, evaluate_run, render_tables
from .manifest import load_manifest


def _add_common(parser: argparse.ArgumentParser) -> None:
    parser.add_argument("--config", help=f"config JSON path (default: ${CONFIG_ENV_VAR} or built-ins)")
    parser.add_argument("--backend", help="'stub' or path to a serialized model file")
    parser.add_argument("--seed", type=int, help="run seed")
    parser.add_argument("--workers", type=int, help="parallel image workers")
    parser.add_argument("--out-dir", help="output directory")


def _resolve_config(args: argparse.Namespace) -> RunConfig:
    config = load_config(args.config)
    overrides = {}
    for name in ("backend", "seed", "workers"):
        value = getattr(args, name, None)
        if value is not None:
            overrides[name] = value
    if getattr(args, "out_dir", None):
        overrides["output_dir"] = args.out_dir
    if overrides:
        record = dataclasses.asdict(config)
        record.update(overrides)
        config = RunConfig.from_dict(record)
    return config


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="histopatch",
        description="Nuclei-density patch extraction and majority-vote diagnosis "
        "for H&E breast-tissue images.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("mask", help="write the bluish mask and accepted/rejected overlay")
    p.add_argument("--image", required=True)
    _add_common(p)

    p = sub.add_parser("extract", help="write per-image patch selection reports")
    group = p.add_mutually_exclusive_group(required=True)
    group.add_argument("--image")
    group.add_argument("--manifest")
    p.add_argument("--out", help="output JSONL path (default stdout)")
    _add_common(p)

    p = sub.add_parser("export-training", help="export augmented training patches per class")
    p.add_argument("--manifest", required=True)
    _add_common(p)

    p = sub.add_parser("infer", help="classify one image and print the decision record")
    p.add_argument("--image", required=True)
    _add_common(p)

    p = sub.add_parser("evaluate", help="score saved results against manifest labels")
    p.add_argument("--results", required=True, help="results.jsonl from a pipeline run")
    p.add_argument("--manifest", required=True)
    _add_common(p)

    p = sub.add_parser("pipeline", help="mask, select, classify and vote over a manifest")
    p.add_argument("--manifest", required=True)
    _add_common(p)

    return parser


def cmd_mask(args) -> int:
    config = _resolve_config(args)
    mask_path, overlay_path = pl.write_mask_outputs(
        args.image, config, config.output_dir
    )
    print(mask_path)
    print(overlay_path)
    return 0


def cmd_extract(args) -> int:
    config = _resolve_config(args)
    if args.image:
        paths = [args.image]
    else:
        paths = [e.path for e in load_manifest(args.manifest).entries]
    from .bluemask import compute_blue_mask
    from .raster import load_image
    from .tiler import select_patches

    lines = []
    failed = 0
    for path in paths:
        try:
            raster = load_image(path)
            mask = compute_blue_mask(raster, config.mask)
            report = select_patches(
                raster, mask, config.mask, config.patch_size, config.stride
            )
            record = {"image": path, **report.to_record()}
        except HistopatchError as exc:
            record = {"image": path, "error": str(exc)}
            failed += 1
        lines.append(json.dumps(record, sort_keys=True))
    text = "\n".join(lines) + "\n"
    if args.out:
        Path(args.out).write_text(text)
    else:
        sys.stdout.write(text)
    return 0 if failed == 0 else 1


def cmd_export_training(args) -> int:
    config = _resolve_config(args)
    manifest = load_manifest(args.manifest)
    n_files, gen_path = pl.export_training(manifest, config, config.output_dir)
    print(f"wrote {n_files} patch files; generation manifest: {gen_path}")
    return 0


def cmd_infer(args) -> int:
    config = _resolve_config(args)
    backend = pl.make_backend(config)
    from .manifest import ManifestEntry

    record = pl.process_image(ManifestEntry(path=args.image), config, backend)
    print(json.dumps(record, sort_keys=True))
    return 0 if record["status"] == "ok" else 1


def cmd_evaluate(args) -> int:
    config = _resolve_config(args)
    manifest = load_manifest(args.manifest)
    truth = manifest.labels()
    outcomes = []
    for line in Path(args.results).read_text().splitlines():
        if not line.strip():
            continue
        record = json.loads(line)
        if record.get("status") != "ok":
            continue
        if truth.get(record["image"]) is None:
            continue
        outcomes.append(
            ImageOutcome(
                image_id=record["image"],
                decision=ClassLabel.from_token(record["decision"]),
                patch_labels=tuple(
                    ClassLabel.from_token(p["label"]) for p in record["patches"]
                ),
            )
        )
    report = evaluate_run(outcomes, truth)
    out = Path(config.output_dir)
    out.mkdir(parents=True, exist_ok=True)
    (out / pl.REPORT_FILENAME).write_text(
        json.dumps(report.to_record(), indent=2, sort_keys=True) + "\n"
    )
    tables = render_tables(report)
    (out / pl.TABLES_FILENAME).write_text(tables)
    print(tables)
    return 0


def cmd_pipeline(args) -> int:
    config = _resolve_config(args)
    manifest = load_manifest(args.manifest)
    records, report, exit_code = pl.run_pipeline(manifest, config, config.output_dir)
    n_ok = sum(1 for r in records if r["status"] == "ok")
    print(f"processed {n_ok}/{len(records)} images -> {config.output_dir}")
    for record in records:
        if record["status"] != "ok":
            print(f"failed: {record['image']}: {record['error']}", file=sys.stderr)
    if report is not None:
        print(render_tables(report))
    return exit_code


_COMMANDS = {
    "mask": cmd_mask,
    "extract": cmd_extract,
    "export-training": cmd_export_training,
    "infer": cmd_infer,
    "evaluate": cmd_evaluate,
    "pipeline": cmd_pipeline,
}


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return _COMMANDS[args.command](args)
    except HistopatchError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
