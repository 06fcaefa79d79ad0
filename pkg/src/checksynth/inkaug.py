"""Ink recoloring and placement sampling for signature layers."""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Mapping

import numpy as np
from PIL import Image

from .geometry import Rect

INK_NAMES = ("black", "dark_gray", "dark_blue", "red", "green")

DEFAULT_RGB = {
    "black": (20, 20, 20),
    "dark_gray": (90, 90, 90),
    "dark_blue": (20, 30, 110),
    "red": (170, 30, 30),
    "green": (25, 100, 50),
}
DEFAULT_WEIGHTS = {"black": 0.2, "dark_gray": 0.2, "dark_blue": 0.3, "red": 0.2, "green": 0.1}

DEFAULT_SCALE_RANGE = (0.6, 0.95)
DEFAULT_AUGMENTATIONS = 5


@dataclass(frozen=True)
class InkColor:
    name: str
    rgb: tuple[int, int, int]


def make_palette(rgb: Mapping[str, tuple[int, int, int]] | None = None) -> dict[str, InkColor]:
    """Palette over all five ink names; ``rgb`` overrides individual defaults."""
    merged = dict(DEFAULT_RGB)
    for name, value in (rgb or {}).items():
        if name not in DEFAULT_RGB:
            raise ValueError(f"unknown ink name {name!r}")
        value = tuple(int(c) for c in value)
        if len(value) != 3 or not all(0 <= c <= 255 for c in value):
            raise ValueError(f"ink {name!r}: rgb must be three 0-255 channels")
        merged[name] = value
    return {name: InkColor(name, merged[name]) for name in INK_NAMES}


DEFAULT_PALETTE = make_palette()


class InkDistribution:
    """Categorical distribution over ink names; missing names have weight 0."""

    def __init__(self, weights: Mapping[str, float] = DEFAULT_WEIGHTS):
        unknown = set(weights) - set(INK_NAMES)
        if unknown:
            raise ValueError(f"unknown ink names {sorted(unknown)}")
        w = np.array([float(weights.get(n, 0.0)) for n in INK_NAMES])
        if (w < 0).any() or not np.isfinite(w).all():
            raise ValueError("ink weights must be finite and non-negative")
        if abs(w.sum() - 1.0) > 1e-9:
            raise ValueError(f"ink weights sum to {w.sum()!r}, expected 1")
        self.weights = dict(zip(INK_NAMES, w.tolist()))
        self._cum = np.cumsum(w)
        self._last = int(np.flatnonzero(w > 0)[-1])

    def __repr__(self):
        return f"InkDistribution({self.weights})"


def sample_ink(dist: InkDistribution, rng: np.random.Generator,
               palette: Mapping[str, InkColor] = DEFAULT_PALETTE) -> InkColor:
    """Draw one ink; uses exactly one uniform variate from ``rng``."""
    u = rng.random()
    idx = int(np.searchsorted(dist._cum, u, side="right"))
    # cumulative sum may fall a hair below 1.0
    idx = min(idx, dist._last)
    return palette[INK_NAMES[idx]]


@dataclass(frozen=True, eq=False)
class SignatureLayer:
    color: InkColor
    alpha: np.ndarray  # float32, values in [0, 1]

    @property
    def size(self) -> tuple[int, int]:
        return self.alpha.shape[1], self.alpha.shape[0]


def recolor(sample, ink: InkColor) -> SignatureLayer:
    mask = np.asarray(sample.mask)
    if not mask.any():
        raise ValueError("cannot recolor an empty mask")
    return SignatureLayer(ink, (mask != 0).astype(np.float32))


@dataclass(frozen=True)
class Placement:
    scale: float
    offset: tuple[int, int]


class PlacementError(ValueError):
    def __init__(self, message: str, max_scale: float):
        super().__init__(message)
        self.max_scale = max_scale


def scaled_size(w: int, h: int, scale: float) -> tuple[int, int]:
    """Pixel size of a w x h raster resampled by ``scale`` (round half up, at least 1)."""
    return max(1, math.floor(w * scale + 0.5)), max(1, math.floor(h * scale + 0.5))


def fitting_scale(sig_dims: tuple[int, int], region: Rect) -> float:
    """Largest scale at which the signature still fits inside ``region``."""
    w, h = sig_dims
    return min(region.w / w, region.h / h)


def sample_placement(sig_dims: tuple[int, int], region: Rect, scale_range: tuple[float, float],
                     rng: np.random.Generator) -> Placement:
    """Uniform scale over the feasible part of ``scale_range``, then a uniform offset.

    The offset is relative to the region origin and keeps the scaled box inside
    the region.
    """
    lo, hi = (float(v) for v in scale_range)
    if not 0 < lo <= hi:
        raise ValueError(f"invalid scale range {scale_range}")
    max_scale = fitting_scale(sig_dims, region)
    if lo > max_scale:
        raise PlacementError(
            f"signature {sig_dims[0]}x{sig_dims[1]} does not fit {region.w}x{region.h} region at "
            f"scale {lo:g}; a scale of at most {max_scale:.6g} is required", max_scale)
    hi = min(hi, max_scale)
    scale = float(rng.uniform(lo, hi)) if hi > lo else lo
    sw, sh = scaled_size(*sig_dims, scale)
    dx = int(rng.integers(0, region.w - sw + 1))
    dy = int(rng.integers(0, region.h - sh + 1))
    return Placement(scale, (dx, dy))


def resample_alpha(alpha: np.ndarray, size: tuple[int, int]) -> np.ndarray:
    """Bilinear resize of an opacity raster to (width, height)."""
    if (alpha.shape[1], alpha.shape[0]) == tuple(size):
        return alpha.astype(np.float32, copy=True)
    im = Image.fromarray(alpha.astype(np.float32))
    out = np.asarray(im.resize(size, Image.Resampling.BILINEAR), dtype=np.float32)
    return np.clip(out, 0.0, 1.0)


def apply_placement(layer: SignatureLayer, placement: Placement) -> tuple[SignatureLayer, Rect]:
    w, h = layer.size
    sw, sh = scaled_size(w, h, placement.scale)
    alpha = resample_alpha(layer.alpha, (sw, sh))
    return SignatureLayer(layer.color, alpha), Rect(placement.offset[0], placement.offset[1], sw, sh)
