"""Regenerate the bundled handwriting-style glyph atlas.

Renders each character with a system TrueType font, slants and jitters it,
and writes one grayscale PNG strip per character plus ``atlas.json``. The
output is committed, so generation never depends on fonts at run time.

    python scripts/build_glyph_atlas.py [--font PATH] [--out DIR]
"""

import argparse
import json
import string
from pathlib import Path

import numpy as np
from PIL import Image, ImageDraw, ImageFont

CHARS = string.ascii_letters + string.digits + " $.,/-'&:"
HEIGHT = 48
FONT_SIZE = 34
SLANT = 0.28


def render_glyph(ch, font, rng):
    canvas = Image.new("L", (HEIGHT * 2, HEIGHT), 255)
    if ch != " ":
        draw = ImageDraw.Draw(canvas)
        draw.text((HEIGHT // 2, 4 + int(rng.integers(-1, 2))), ch, font=font, fill=0)
        angle = float(rng.uniform(-4, 4))
        canvas = canvas.rotate(angle, resample=Image.Resampling.BILINEAR, fillcolor=255)
        canvas = canvas.transform(canvas.size, Image.Transform.AFFINE,
                                  (1, SLANT, -SLANT * HEIGHT / 2, 0, 1, 0),
                                  resample=Image.Resampling.BILINEAR, fillcolor=255)
        ink = np.asarray(canvas) < 200
        cols = np.flatnonzero(ink.any(axis=0))
        left, right = cols[0] - 1, cols[-1] + 2
    else:
        left, right = 0, HEIGHT // 4
    return canvas.crop((max(0, left), 0, right, HEIGHT))


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--font", default="/usr/share/fonts/truetype/dejavu/DejaVuSans.ttf")
    ap.add_argument("--out", default=str(Path(__file__).resolve().parents[1]
                                         / "src" / "checksynth" / "assets" / "glyphs"))
    ap.add_argument("--seed", type=int, default=7)
    args = ap.parse_args()

    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    font = ImageFont.truetype(args.font, FONT_SIZE)
    rng = np.random.default_rng(args.seed)
    mapping = {}
    for ch in CHARS:
        name = f"u{ord(ch):04x}.png"
        render_glyph(ch, font, rng).save(out / name)
        mapping[ch] = name
    (out / "atlas.json").write_text(json.dumps({"height": HEIGHT, "glyphs": mapping},
                                               indent=1, ensure_ascii=False) + "\n")
    print(f"wrote {len(mapping)} glyphs to {out}")


if __name__ == "__main__":
    main()
