"""Procedural test images.

The package has no bundled photographs, so experiments and tests build
their inputs: flat fields and separated-color images with provable
clustering outcomes, and a textured generator (smooth tonal bands plus
film-grain speckle) whose color statistics behave like a small
natural-image crop: many clusters under a tight admission threshold,
few under a loose one.
"""

from __future__ import annotations

import numpy as np

from .ppm import Image


def constant_image(width: int, height: int, color=(90, 120, 200)) -> Image:
    pixels = np.tile(np.asarray(color, dtype=np.uint8), (width * height, 1))
    return Image(width=width, height=height, pixels=pixels)


def two_color_image(
    width: int, height: int, dark=(25, 25, 25), light=(230, 230, 230)
) -> Image:
    """Left half one color, right half another, far apart in RGB.

    The separation makes the admission test decisive for any reasonable
    threshold, so every ordering yields exactly two clusters.
    """
    if width < 2:
        raise ValueError("need width >= 2 for two columns")
    row = np.empty((width, 3), dtype=np.uint8)
    row[: width // 2] = dark
    row[width // 2 :] = light
    pixels = np.tile(row, (height, 1))
    return Image(width=width, height=height, pixels=pixels)


def planted_colors_image(width: int = 32, height: int = 32, seed: int = 0) -> Image:
    """Four well-separated base colors with small integer jitter.

    Base colors sit 0.8 apart per differing channel on the [0, 1] scale
    while jitter stays within +/-2 intensity steps, so within-color and
    cross-color deviations are separated by orders of magnitude and a
    threshold between them recovers exactly four clusters under every
    ordering.
    """
    base_colors = np.asarray(
        [
            [26, 26, 26],
            [230, 26, 26],
            [26, 230, 26],
            [26, 26, 230],
        ],
        dtype=np.int64,
    )
    m = width * height
    rng = np.random.Generator(np.random.PCG64(seed))
    which = rng.integers(0, len(base_colors), size=m)
    # Guarantee each color appears at least twice so every cluster can be
    # founded as a pair.
    which[:8] = np.repeat(np.arange(4), 2)
    jitter = rng.integers(-2, 3, size=(m, 3))
    pixels = np.clip(base_colors[which] + jitter, 0, 255).astype(np.uint8)
    return Image(width=width, height=height, pixels=pixels)


def textured_image(
    width: int,
    height: int,
    seed: int = 0,
    levels: int = 180,
    grain_fraction: float = 0.5,
    fleck_fraction: float = 0.1,
) -> Image:
    """A grainy tonal-gradient texture standing in for a natural-image crop.

    Construction, in three layers:

    1. A smooth scalar field (a few low-frequency cosine gratings) is
       quantized into ``levels`` tonal bands, and each band maps to a
       color drawn from a slow lattice walk: one channel at a time drifts
       by one intensity step, with long runs per channel.  Neighboring
       bands therefore differ by a single 8-bit quantum, like a posterized
       gradient.
    2. Grain: a random half-ish of the pixels shift one intensity step in
       a channel the local walk is not using, giving every band a small
       family of recurring off-tone variants.
    3. Flecks: a sparse sprinkle of pixels jumps one or two steps in a
       random channel.  Most land on colors nothing else occupies, so they
       appear exactly once in the image.

    The point of the layering is to give the color cloud structure at
    several separation scales at once.  Under a tight admission threshold
    nearly every distinct color holds its own cluster; as the threshold
    loosens, the one-off fleck colors seed mixed-variance groups that
    gradually soak up their surroundings; under a loose threshold whole
    gradient runs collapse into a few elongated clusters.  Cluster counts
    then fall steadily as the threshold grows, the behavior a small crop
    of a real photograph shows.
    """
    if levels < 2:
        raise ValueError("need at least two tonal bands")
    rng = np.random.Generator(np.random.PCG64(seed))
    ys, xs = np.mgrid[0:height, 0:width]
    xs = xs / width
    ys = ys / height

    field = np.zeros((height, width))
    for amp in (0.5, 0.3, 0.2, 0.1):
        fx, fy = rng.integers(1, 5, size=2)
        phase = rng.uniform(0.0, 2.0 * np.pi)
        field += amp * np.cos(2.0 * np.pi * (fx * xs + fy * ys) + phase)
    low = field.min()
    high = field.max()
    field = (field - low) / ((high - low) * 1.0000001)
    band = (field * levels).astype(np.int64).reshape(width * height)

    # Lattice-walk palette.  One channel moves per step, one quantum at a
    # time, reflecting off the working range so the walk never saturates;
    # channel switches are rare so runs stay long.
    palette = np.zeros((levels, 3), dtype=np.int64)
    palette[0] = rng.integers(60, 196, size=3)
    walk_channel = np.zeros(levels, dtype=np.int64)
    channel = int(rng.integers(0, 3))
    direction = np.ones(3, dtype=np.int64)
    for k in range(1, levels):
        if rng.random() > 0.9867:
            channel = int(rng.integers(0, 3))
        color = palette[k - 1].copy()
        if not 10 <= color[channel] + direction[channel] <= 245:
            direction[channel] = -direction[channel]
        color[channel] += direction[channel]
        palette[k] = color
        walk_channel[k] = channel
    walk_channel[0] = walk_channel[1] if levels > 1 else 0

    m = width * height
    pixels = palette[band]
    draw = rng.random(m)

    grained = draw < grain_fraction
    resting = np.array([[1, 2], [0, 2], [0, 1]])
    grain_channel = resting[walk_channel[band], rng.integers(0, 2, size=m)]
    grain_step = rng.choice([-1, 1], size=m)
    pixels[grained, grain_channel[grained]] += grain_step[grained]

    flecked = (draw >= grain_fraction) & (draw < grain_fraction + fleck_fraction)
    fleck_channel = rng.integers(0, 3, size=m)
    fleck_step = rng.choice([-2, -1, 1, 2], size=m)
    pixels[flecked, fleck_channel[flecked]] += fleck_step[flecked]

    return Image(
        width=width,
        height=height,
        pixels=np.clip(pixels, 0, 255).astype(np.uint8),
    )
