#!/usr/bin/env python3
"""Generate a small synthetic H&E-look dataset plus its manifest.

The images are pink stroma with blue nuclei dots whose density rises with
the class severity; enough to drive the whole pipeline without real slides.
"""

import argparse

from histopatch.synthetic import make_demo_dataset


def main() -> int:
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--out", default="demo_data", help="output directory")
    parser.add_argument("--per-class", type=int, default=2)
    parser.add_argument("--width", type=int, default=640)
    parser.add_argument("--height", type=int, default=640)
    parser.add_argument("--seed", type=int, default=0)
    args = parser.parse_args()
    manifest = make_demo_dataset(
        args.out,
        per_class=args.per_class,
        width=args.width,
        height=args.height,
        seed=args.seed,
    )
    print(manifest)
    return 0


if __name__ == "__main__":
    raise SystemExit(main())
