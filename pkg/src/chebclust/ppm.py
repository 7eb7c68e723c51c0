"""Binary PPM (P6) reading/writing, pixel-to-feature conversion, and
reconstruction of an image from a finished run by painting every pixel
with its cluster's mean color.
"""

from __future__ import annotations

import os
from dataclasses import dataclass

import numpy as np

_WHITESPACE = b" \t\n\r\x0b\x0c"


class PpmFormatError(ValueError):
    """Malformed PPM input; carries the byte offset where parsing failed."""

    def __init__(self, message: str, offset: int):
        super().__init__(f"{message} (byte offset {offset})")
        self.offset = offset


class AssignmentMismatchError(ValueError):
    """RunResult does not cover the image it is being applied to."""


@dataclass
class Image:
    """An RGB image: pixels are a (width*height, 3) uint8 array, row-major."""

    width: int
    height: int
    pixels: np.ndarray

    def __post_init__(self):
        if self.width < 1 or self.height < 1:
            raise ValueError("image dimensions must be positive")
        self.pixels = np.asarray(self.pixels, dtype=np.uint8)
        if self.pixels.shape != (self.width * self.height, 3):
            raise ValueError(
                f"expected {self.width * self.height} RGB pixels, got shape {self.pixels.shape}"
            )

    @property
    def example_count(self) -> int:
        return self.width * self.height


class _HeaderScanner:
    """Walks the PPM header: whitespace, '#' comments, ASCII integer fields."""

    def __init__(self, data: bytes, pos: int):
        self.data = data
        self.pos = pos

    def skip_separators(self) -> None:
        data, n = self.data, len(self.data)
        while self.pos < n:
            byte = data[self.pos : self.pos + 1]
            if byte in (b"#",):
                while self.pos < n and data[self.pos : self.pos + 1] not in (b"\n", b"\r"):
                    self.pos += 1
            elif byte in _WHITESPACE:
                self.pos += 1
            else:
                return

    def read_int(self, name: str) -> int:
        self.skip_separators()
        start = self.pos
        data, n = self.data, len(self.data)
        while self.pos < n and data[self.pos : self.pos + 1].isdigit():
            self.pos += 1
        if self.pos == start:
            raise PpmFormatError(f"expected integer for {name}", start)
        return int(data[start : self.pos])


def read_ppm(data: bytes) -> Image:
    """Parse a binary PPM (magic P6, maxval 255).

    Header comments are allowed; exactly one whitespace byte separates
    the maxval from the raster.  Pixel values come through untouched.
    """
    if data[:2] != b"P6":
        raise PpmFormatError("not a binary PPM: magic is not P6", 0)
    scanner = _HeaderScanner(data, 2)
    width = scanner.read_int("width")
    height = scanner.read_int("height")
    maxval = scanner.read_int("maxval")
    if width < 1 or height < 1:
        raise PpmFormatError(f"bad dimensions {width}x{height}", scanner.pos)
    if maxval != 255:
        raise PpmFormatError(f"unsupported maxval {maxval} (only 255)", scanner.pos)
    if scanner.pos >= len(data) or data[scanner.pos : scanner.pos + 1] not in _WHITESPACE:
        raise PpmFormatError("expected single whitespace after maxval", scanner.pos)
    start = scanner.pos + 1
    expected = 3 * width * height
    raster = data[start : start + expected]
    if len(raster) < expected:
        raise PpmFormatError(
            f"truncated raster: expected {expected} bytes, found {len(raster)}",
            start + len(raster),
        )
    pixels = np.frombuffer(raster, dtype=np.uint8).reshape(width * height, 3).copy()
    return Image(width=width, height=height, pixels=pixels)


def write_ppm(img: Image) -> bytes:
    """Serialize with the canonical header: P6\\n<w> <h>\\n255\\n<raster>."""
    header = f"P6\n{img.width} {img.height}\n255\n".encode("ascii")
    return header + img.pixels.tobytes()


def load(path: str | os.PathLike) -> Image:
    with open(path, "rb") as fh:
        return read_ppm(fh.read())


def save(path: str | os.PathLike, img: Image) -> None:
    with open(path, "wb") as fh:
        fh.write(write_ppm(img))


def to_features(img: Image) -> np.ndarray:
    """Pixels as rows of a (M, 3) float array on the [0, 1] scale."""
    return img.pixels.astype(np.float64) / 255.0


@dataclass(frozen=True)
class Reconstruction:
    """Painted image plus the reconstruction error under three conventions.

    trerr is the mean per-pixel L2 deviation on the 0-255 scale (the
    convention used for reporting); trerr_sum is the unnormalized sum on
    that scale and trerr_unit the mean on the [0, 1] feature scale, kept
    so either reading of "total error" can be compared directly.
    """

    image: Image
    trerr: float
    trerr_sum: float
    trerr_unit: float


def reconstruct(img: Image, result, cluster_means=None) -> Reconstruction:
    """Paint every pixel with its cluster's mean color.

    ``result`` is a finished RunResult (a bare assignments array works
    too); ``cluster_means`` holds one [0, 1]-scale RGB row per cluster
    id and defaults to the means recorded in the result.  Painted
    channels are rounded half-up and clamped.  The error is computed
    against the unrounded means, so a cluster whose members are all one
    color contributes exactly zero.
    """
    assignments = np.asarray(getattr(result, "assignments", result))
    if cluster_means is None:
        cluster_means = getattr(result, "cluster_means", None)
        if cluster_means is None:
            raise AssignmentMismatchError("no cluster means available")
    means = np.atleast_2d(np.asarray(cluster_means, dtype=np.float64))
    if assignments.shape != (img.example_count,):
        raise AssignmentMismatchError(
            f"assignments cover {assignments.shape} examples, image has {img.example_count}"
        )
    if assignments.size and (assignments.min() < 0 or assignments.max() >= means.shape[0]):
        raise AssignmentMismatchError(
            f"assignment ids outside 0..{means.shape[0] - 1}"
        )

    features = to_features(img)
    per_pixel = features - means[assignments]
    deviations = np.sqrt(np.einsum("ij,ij->i", per_pixel, per_pixel))
    trerr_unit = float(deviations.mean())

    palette = np.floor(means * 255.0 + 0.5)
    palette = np.clip(palette, 0, 255).astype(np.uint8)
    painted = Image(width=img.width, height=img.height, pixels=palette[assignments])
    return Reconstruction(
        image=painted,
        trerr=255.0 * trerr_unit,
        trerr_sum=float(255.0 * deviations.sum()),
        trerr_unit=trerr_unit,
    )
