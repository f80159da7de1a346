"""Trainer command line: train, export, parity."""

from __future__ import annotations

import argparse
import dataclasses
import sys

from .config import TrainConfig
from .errors import TrainerError
from .export import export_model, parity_check
from .train import load_checkpoint, train_two_stage


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="histopatch-train",
        description="Two-stage fine-tune of the modified Inception-v3 patch classifier.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("train", help="run both training stages over an exported patch dataset")
    p.add_argument("--data", required=True, help="training-export root (one directory per class)")
    p.add_argument("--out", default="train_out")
    p.add_argument("--stage1-epochs", type=int)
    p.add_argument("--stage2-epochs", type=int)
    p.add_argument("--stage1-lr", type=float)
    p.add_argument("--stage2-lr", type=float)
    p.add_argument("--stage2-momentum", type=float)
    p.add_argument("--batch-size", type=int)
    p.add_argument("--input-size", type=int)
    p.add_argument("--seed", type=int)
    p.add_argument("--from-scratch", action="store_true", help="random-init backbone (no pretrained weights)")

    p = sub.add_parser("export", help="serialize a trained checkpoint to the portable graph format")
    p.add_argument("--checkpoint", required=True)
    p.add_argument("--out", default="model.pt2")

    p = sub.add_parser("parity", help="compare native and exported inference on random patches")
    p.add_argument("--checkpoint", required=True)
    p.add_argument("--model", required=True, help="exported .pt2 path")
    p.add_argument("--n", type=int, default=32)
    p.add_argument("--seed", type=int, default=2024)

    return parser


def _config_from_args(args) -> TrainConfig:
    config = TrainConfig()
    overrides = {}
    mapping = {
        "stage1_epochs": args.stage1_epochs,
        "stage2_epochs": args.stage2_epochs,
        "stage1_lr": args.stage1_lr,
        "stage2_lr": args.stage2_lr,
        "stage2_momentum": args.stage2_momentum,
        "batch_size": args.batch_size,
        "input_size": args.input_size,
        "seed": args.seed,
    }
    for key, value in mapping.items():
        if value is not None:
            overrides[key] = value
    if args.from_scratch:
        overrides["pretrained"] = False
    return dataclasses.replace(config, **overrides) if overrides else config


def cmd_train(args) -> int:
    config = _config_from_args(args)
    result = train_two_stage(args.data, config, args.out)
    for stats in result.history:
        print(
            f"stage {stats.stage} epoch {stats.epoch}: "
            f"loss={stats.loss:.4f} accuracy={stats.accuracy:.3f}"
        )
    print(f"checkpoint: {result.checkpoint_path}")
    return 0


def cmd_export(args) -> int:
    model, config = load_checkpoint(args.checkpoint)
    model_path, meta_path = export_model(model, args.out, config)
    print(f"model: {model_path}")
    print(f"metadata: {meta_path}")
    return 0


def cmd_parity(args) -> int:
    model, config = load_checkpoint(args.checkpoint)
    result = parity_check(model, args.model, config, n=args.n, seed=args.seed)
    print(
        f"top-1 agreement {result.top1_agreement}/{result.n_patches}, "
        f"max probability deviation {result.max_abs_diff:.2e}"
    )
    return 0 if result.perfect_agreement and result.max_abs_diff < 1e-4 else 1


_COMMANDS = {"train": cmd_train, "export": cmd_export, "parity": cmd_parity}


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return _COMMANDS[args.command](args)
    except TrainerError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
