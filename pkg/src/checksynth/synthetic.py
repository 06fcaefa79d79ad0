"""Stand-in collection sheets with scribbled signatures, for demos and tests.

Real collection sheets are scans of people signing; these are procedurally
drawn so the pipeline can run end to end without private data. Each person
gets a stroke "style"; forgeries are perturbed copies of another person's
style. Sheets use the 4x2 grid layout, eight boxes per sheet.
"""

from __future__ import annotations

import csv
from pathlib import Path

import numpy as np
from PIL import Image, ImageDraw

from . import seeds

SHEET_SIZE = (800, 1100)
GRID = (2, 4)  # columns, rows
PEN_INK = {"bp": 35, "pc": 115}


def _style(rng: np.random.Generator) -> dict:
    return {
        "freqs": rng.uniform(0.5, 3.0, size=4),
        "amps": rng.uniform(0.1, 0.45, size=4),
        "phases": rng.uniform(0, 2 * np.pi, size=4),
        "loops": int(rng.integers(2, 6)),
        "slant": rng.uniform(-0.3, 0.3),
    }


def _stroke(style: dict, rng: np.random.Generator, jitter: float) -> np.ndarray:
    t = np.linspace(0, 1, 300)
    f = style["freqs"] * (1 + jitter * rng.normal(size=4))
    a = style["amps"] * (1 + jitter * rng.normal(size=4))
    p = style["phases"] + jitter * rng.normal(size=4)
    y = sum(a[k] * np.sin(2 * np.pi * f[k] * t * style["loops"] / 2 + p[k]) for k in range(4))
    x = t + 0.04 * np.sin(2 * np.pi * style["loops"] * t + p[0])
    x = x + style["slant"] * y
    return np.stack([x, y], axis=1)


def draw_signature(draw: ImageDraw.ImageDraw, cell: tuple[int, int, int, int], style: dict,
                   rng: np.random.Generator, ink: int, jitter: float) -> tuple[int, int, int, int]:
    """Draw one signature inside ``cell`` (x, y, w, h); returns a padded box around it."""
    cx, cy, cw, ch = cell
    pts = _stroke(style, rng, jitter)
    pts -= pts.min(axis=0)
    span = np.maximum(pts.max(axis=0), 1e-6)
    sw, sh = cw * rng.uniform(0.55, 0.75), ch * rng.uniform(0.3, 0.5)
    pts = pts / span * [sw, sh]
    ox = cx + rng.uniform(0.05, 0.95) * (cw - sw)
    oy = cy + rng.uniform(0.1, 0.9) * (ch - sh)
    pts += [ox, oy]
    width = int(rng.integers(2, 4))
    draw.line([tuple(p) for p in pts], fill=ink, width=width, joint="curve")
    pad = 6 + width
    x0, y0 = np.floor(pts.min(axis=0)).astype(int) - pad
    x1, y1 = np.ceil(pts.max(axis=0)).astype(int) + pad
    return int(x0), int(y0), int(x1 - x0), int(y1 - y0)


def make_collection(out_dir: str | Path, persons: int = 19, genuine_per_pen: int = 8,
                    forged_per_pen: int = 4, seed: int = 0) -> Path:
    """Write sheet PNGs plus ``manifest.csv``; returns the manifest path.

    Per person: genuine signatures with ballpoint then pencil, then the
    forgeries of that person's signature (both pens).
    """
    out_dir = Path(out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    styles = [_style(seeds.stream(seed, "style", p)) for p in range(persons)]
    cols, rows = GRID
    cw, ch = SHEET_SIZE[0] // cols, SHEET_SIZE[1] // rows
    cells = [(c * cw + 10, r * ch + 10, cw - 20, ch - 20) for r in range(rows) for c in range(cols)]

    records = []
    for p in range(persons):
        pid = f"P{p + 1:02d}"
        jobs = [(False, "bp")] * genuine_per_pen + [(False, "pc")] * genuine_per_pen + \
            [(True, "bp")] * forged_per_pen + [(True, "pc")] * forged_per_pen
        rng = seeds.stream(seed, "sheets", p)
        for sheet_no, start in enumerate(range(0, len(jobs), len(cells))):
            name = f"{pid}_sheet{sheet_no + 1}.png"
            img = Image.new("L", SHEET_SIZE, 250)
            draw = ImageDraw.Draw(img)
            for r in range(rows + 1):
                draw.line([(0, r * ch), (SHEET_SIZE[0], r * ch)], fill=200)
            draw.line([(cw, 0), (cw, SHEET_SIZE[1])], fill=200)
            for cell, (forged, pen) in zip(cells, jobs[start:start + len(cells)]):
                box = draw_signature(draw, cell, styles[p], rng, PEN_INK[pen],
                                     jitter=0.18 if forged else 0.05)
                records.append([name, pid, int(forged), pen, *box])
            noise = seeds.stream(seed, "noise", name).normal(0, 3, size=img.size[::-1])
            arr = np.clip(np.asarray(img, dtype=np.float64) + noise, 0, 255).astype(np.uint8)
            Image.fromarray(arr).save(out_dir / name)

    manifest = out_dir / "manifest.csv"
    with manifest.open("w", newline="", encoding="utf-8") as fh:
        w = csv.writer(fh)
        w.writerow(["sheet_file", "person_id", "forged", "pen", "x", "y", "w", "h"])
        w.writerows(records)
    return manifest
