"""Stroke-thickening dilation for dark ink on light paper.

On an intensity raster, growing the dark set is a neighborhood minimum; the
square neighborhood is clamped to the image bounds.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass
from pathlib import Path
from typing import NamedTuple

import numpy as np
from PIL import Image, UnidentifiedImageError

log = logging.getLogger(__name__)

IMAGE_SUFFIXES = {".png", ".jpg", ".jpeg", ".bmp", ".tif", ".tiff"}


@dataclass(frozen=True)
class StructuringElement:
    radius: int = 1
    iterations: int = 1
    shape: str = "square"

    def __post_init__(self):
        if self.shape != "square":
            raise ValueError(f"unsupported structuring element shape {self.shape!r}")
        if int(self.radius) != self.radius or self.radius < 1:
            raise ValueError("radius must be an integer >= 1")
        if int(self.iterations) != self.iterations or self.iterations < 1:
            raise ValueError("iterations must be an integer >= 1")


def _min_along(a: np.ndarray, radius: int, axis: int) -> np.ndarray:
    n = a.shape[axis]
    padded = np.concatenate([np.take(a, [0] * radius, axis=axis), a,
                             np.take(a, [n - 1] * radius, axis=axis)], axis=axis)
    out = np.take(padded, range(0, n), axis=axis)
    for k in range(1, 2 * radius + 1):
        np.minimum(out, np.take(padded, range(k, k + n), axis=axis), out=out)
    return out


def dilate_dark(image: np.ndarray, se: StructuringElement = StructuringElement()) -> np.ndarray:
    """Per-channel minimum over a (2r+1) x (2r+1) window, repeated ``se.iterations`` times."""
    image = np.asarray(image)
    if image.ndim not in (2, 3):
        raise ValueError(f"expected a 2-D or 3-D raster, got shape {image.shape}")
    out = image
    for _ in range(se.iterations):
        # square window is separable; edge replication equals clamping for a minimum
        out = _min_along(_min_along(out, se.radius, 0), se.radius, 1)
    return out.copy() if out is image else out


class PreprocessResult(NamedTuple):
    count: int
    skipped: list[tuple[str, str]]


def preprocess_corpus(in_dir: str | Path, out_dir: str | Path,
                      se: StructuringElement = StructuringElement()) -> PreprocessResult:
    """Dilate every image in ``in_dir`` into ``out_dir`` under the same file name.

    Unreadable files are skipped and listed with the reason. JPEG outputs are
    re-encoded lossily, so out <= in is only exact for lossless formats.
    """
    in_dir, out_dir = Path(in_dir), Path(out_dir)
    if not in_dir.is_dir():
        raise NotADirectoryError(f"input directory not found: {in_dir}")
    out_dir.mkdir(parents=True, exist_ok=True)
    count, skipped = 0, []
    for path in sorted(p for p in in_dir.iterdir() if p.is_file()):
        if path.suffix.lower() not in IMAGE_SUFFIXES:
            continue
        try:
            with Image.open(path) as im:
                im.load()
                mode = im.mode if im.mode in ("L", "RGB") else "RGB"
                pixels = np.asarray(im.convert(mode))
        except (UnidentifiedImageError, OSError, SyntaxError) as exc:
            log.warning("skipping %s: %s", path.name, exc)
            skipped.append((path.name, str(exc)))
            continue
        Image.fromarray(dilate_dark(pixels, se)).save(out_dir / path.name)
        count += 1
    return PreprocessResult(count, skipped)
