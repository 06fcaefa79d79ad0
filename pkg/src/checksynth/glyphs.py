"""Glyph atlas: one grayscale image strip per character, indexed by ``atlas.json``.

``atlas.json`` holds ``{"height": H, "glyphs": {"<char>": "<file>.png", ...}}``;
every strip is H pixels tall with dark ink on a light background.
"""

from __future__ import annotations

import json
from importlib import resources
from pathlib import Path

import numpy as np
from PIL import Image


class GlyphAtlas:
    def __init__(self, glyphs: dict[str, np.ndarray], height: int):
        for ch, g in glyphs.items():
            if g.ndim != 2 or g.shape[0] != height:
                raise ValueError(f"glyph {ch!r} must be a {height}-pixel tall grayscale strip")
        self.glyphs = glyphs
        self.height = height

    @classmethod
    def load(cls, directory: str | Path) -> "GlyphAtlas":
        directory = Path(directory)
        manifest = json.loads((directory / "atlas.json").read_text(encoding="utf-8"))
        glyphs = {}
        for ch, name in manifest["glyphs"].items():
            with Image.open(directory / name) as im:
                glyphs[ch] = np.asarray(im.convert("L")).copy()
        return cls(glyphs, int(manifest["height"]))

    def missing(self, text: str) -> set[str]:
        return set(text) - set(self.glyphs)

    def coverage(self, text: str) -> np.ndarray:
        """Ink opacity of ``text`` laid out left to right, float32 in [0, 1]."""
        if not text:
            raise ValueError("empty text")
        missing = self.missing(text)
        if missing:
            raise ValueError(f"no glyphs for {''.join(sorted(missing))!r}")
        strip = np.concatenate([self.glyphs[ch] for ch in text], axis=1)
        return (255.0 - strip.astype(np.float32)) / 255.0


_default: GlyphAtlas | None = None


def default_atlas() -> GlyphAtlas:
    """The bundled atlas (cached)."""
    global _default
    if _default is None:
        with resources.as_file(resources.files("checksynth") / "assets" / "glyphs") as path:
            _default = GlyphAtlas.load(path)
    return _default
