"""Write the synthetic test-image family to a directory as binary PPMs.

Run from the repository root:

    python3 scripts/make_images.py out_dir --seed 3

The emitted set covers the cases the engine is exercised on: a constant
frame, a two-tone frame, a planted four-color frame, and textured crops
at a few sizes.  All of them are deterministic in the seed.
"""

import argparse
import pathlib

from chebclust.ppm import save
from chebclust.synth import (
    constant_image,
    planted_colors_image,
    textured_image,
    two_color_image,
)


def main() -> int:
    parser = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    parser.add_argument("out_dir", type=pathlib.Path)
    parser.add_argument("--seed", type=int, default=3, help="texture seed")
    args = parser.parse_args()

    args.out_dir.mkdir(parents=True, exist_ok=True)
    frames = {
        "constant_8x8.ppm": constant_image(8, 8, (77, 200, 13)),
        "two_tone_16x16.ppm": two_color_image(16, 16),
        "planted_32x32.ppm": planted_colors_image(32, 32, seed=args.seed),
        "textured_16x16.ppm": textured_image(16, 16, seed=args.seed),
        "textured_64x64.ppm": textured_image(64, 64, seed=args.seed),
    }
    for name, image in frames.items():
        path = args.out_dir / name
        save(path, image)
        print(f"wrote {path} ({image.width}x{image.height})")
    return 0


if __name__ == "__main__":
    raise SystemExit(main())
