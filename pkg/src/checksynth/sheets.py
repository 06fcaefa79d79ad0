"""Signature collection sheets: manifest parsing, cropping and binarization.

A manifest is a CSV file with a header row and one record per signature box::

    sheet_file,person_id,forged,pen,x,y,w,h[,threshold]

``forged`` is 0 or 1, ``pen`` is ``bp`` (ballpoint) or ``pc`` (pencil). The
optional ``threshold`` column overrides the binarization threshold for the
whole sheet.
"""

from __future__ import annotations

import csv
import json
from collections import Counter, OrderedDict
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np
from PIL import Image

from .geometry import Rect, ink_bbox

DEFAULT_THRESHOLD = 160
PEN_CODES = {"bp": "ballpoint", "pc": "pencil"}
PENS = ("ballpoint", "pencil")
MANIFEST_FIELDS = ["sheet_file", "person_id", "forged", "pen", "x", "y", "w", "h"]

# Collection protocol: ~16 genuine per person, 8 forgeries split 4/4 by pen.
EXPECTED_GENUINE = 16
EXPECTED_FORGED = 8
EXPECTED_FORGED_PER_PEN = 4


class ManifestError(ValueError):
    pass


@dataclass(frozen=True)
class SheetBox:
    rect: Rect
    forged: bool
    pen: str


@dataclass
class SheetAnnotation:
    sheet_id: str
    person_id: str
    boxes: list[SheetBox] = field(default_factory=list)
    threshold: int | None = None


@dataclass(frozen=True, eq=False)
class SignatureSample:
    """A tightly cropped signature: grayscale pixels plus its binary ink mask."""

    person_id: str
    forged: bool
    pen: str
    crop: np.ndarray
    mask: np.ndarray

    def __post_init__(self):
        if self.crop.shape != self.mask.shape:
            raise ValueError(f"crop {self.crop.shape} and mask {self.mask.shape} differ")
        if not self.mask.any():
            raise ValueError("signature mask contains no ink")
        self.crop.setflags(write=False)
        self.mask.setflags(write=False)

    @property
    def size(self) -> tuple[int, int]:
        """(width, height)"""
        return self.mask.shape[1], self.mask.shape[0]

    def __eq__(self, other):
        if not isinstance(other, SignatureSample):
            return NotImplemented
        return (self.person_id, self.forged, self.pen) == (other.person_id, other.forged, other.pen) \
            and np.array_equal(self.crop, other.crop) and np.array_equal(self.mask, other.mask)


def to_luminance(image: np.ndarray) -> np.ndarray:
    """8-bit luminance with Rec.601 weights (same integer rounding as PIL's "L" mode)."""
    if image.ndim == 2:
        return image.astype(np.uint8, copy=False)
    if image.ndim == 3 and image.shape[2] in (3, 4):
        rgb = image[..., :3].astype(np.uint32)
        lum = (rgb[..., 0] * 19595 + rgb[..., 1] * 38470 + rgb[..., 2] * 7471 + 0x8000) >> 16
        return lum.astype(np.uint8)
    raise ValueError(f"unsupported raster shape {image.shape}")


def load_sheet(path: str | Path) -> np.ndarray:
    with Image.open(path) as im:
        return np.asarray(im.convert("L")).copy()


def _image_size(path: Path) -> tuple[int, int]:
    with Image.open(path) as im:
        return im.size


def load_manifest(path: str | Path, sheets_dir: str | Path | None = None) -> list[SheetAnnotation]:
    """Parse a manifest into one annotation per (sheet, person), boxes in file order.

    When ``sheets_dir`` is given, each sheet's raster size is read and every box
    is checked against it; otherwise only the non-negative origin is checked.
    """
    path = Path(path)
    if not path.is_file():
        raise FileNotFoundError(f"manifest not found: {path}")
    groups: OrderedDict[tuple[str, str], SheetAnnotation] = OrderedDict()
    sizes: dict[str, tuple[int, int]] = {}

    with path.open(newline="", encoding="utf-8") as fh:
        reader = csv.reader(fh)
        header = next(reader, None)
        if header is None:
            return []
        header = [h.strip() for h in header]
        if header[:8] != MANIFEST_FIELDS or len(header) > 9 or \
                (len(header) == 9 and header[8] != "threshold"):
            raise ManifestError(f"{path}:1: unexpected header {header}")
        for lineno, row in enumerate(reader, start=2):
            if not row or all(not c.strip() for c in row):
                continue
            if len(row) not in (8, 9):
                raise ManifestError(f"{path}:{lineno}: expected 8 or 9 fields, got {len(row)}")
            sheet_file, person_id, forged, pen = (c.strip() for c in row[:4])
            try:
                x, y, w, h = (int(c) for c in row[4:8])
                threshold = int(row[8]) if len(row) == 9 and row[8].strip() else None
            except ValueError:
                raise ManifestError(f"{path}:{lineno}: non-integer geometry or threshold") from None
            if not sheet_file or not person_id:
                raise ManifestError(f"{path}:{lineno}: empty sheet_file or person_id")
            if forged not in ("0", "1"):
                raise ManifestError(f"{path}:{lineno}: forged must be 0 or 1, got {forged!r}")
            if pen not in PEN_CODES:
                raise ManifestError(f"{path}:{lineno}: pen must be bp or pc, got {pen!r}")
            if threshold is not None and not 0 <= threshold <= 255:
                raise ManifestError(f"{path}:{lineno}: threshold out of range")
            rect = Rect(x, y, w, h)
            if w <= 0 or h <= 0:
                raise ManifestError(f"{path}:{lineno}: rect has non-positive size")
            if x < 0 or y < 0:
                raise ManifestError(f"{path}:{lineno}: rect outside bounds")
            if sheets_dir is not None:
                if sheet_file not in sizes:
                    sizes[sheet_file] = _image_size(Path(sheets_dir) / sheet_file)
                sw, sh = sizes[sheet_file]
                if not rect.inside(sw, sh):
                    raise ManifestError(f"{path}:{lineno}: rect outside bounds of {sw}x{sh} sheet")

            ann = groups.get((sheet_file, person_id))
            if ann is None:
                ann = groups[(sheet_file, person_id)] = SheetAnnotation(sheet_file, person_id)
            if threshold is not None:
                ann.threshold = threshold
            ann.boxes.append(SheetBox(rect, forged == "1", PEN_CODES[pen]))
    return list(groups.values())


def crop_signature(sheet: np.ndarray, box: Rect) -> np.ndarray:
    height, width = sheet.shape[:2]
    if box.w <= 0 or box.h <= 0:
        raise ValueError(f"zero-area box {tuple(box)}")
    if not box.inside(width, height):
        raise ValueError(f"box {tuple(box)} outside {width}x{height} sheet")
    return sheet[box.y:box.y2, box.x:box.x2].copy()


def binarize(crop: np.ndarray, threshold: int = DEFAULT_THRESHOLD) -> np.ndarray:
    """1 where the pixel is darker than ``threshold``."""
    return (to_luminance(crop) < threshold).astype(np.uint8)


def extract_sample(sheet: np.ndarray, box: SheetBox, person_id: str,
                   threshold: int = DEFAULT_THRESHOLD) -> SignatureSample:
    """Crop, binarize and tighten one box into a sample."""
    crop = crop_signature(to_luminance(sheet), box.rect)
    mask = binarize(crop, threshold)
    tight = ink_bbox(mask)
    if tight is None:
        raise ValueError(f"no ink below threshold {threshold} in box {tuple(box.rect)}")
    sl = (slice(tight.y, tight.y2), slice(tight.x, tight.x2))
    return SignatureSample(person_id, box.forged, box.pen, crop[sl].copy(), mask[sl].copy())


@dataclass
class PersonReport:
    person_id: str
    genuine: Counter = field(default_factory=Counter)
    forged: Counter = field(default_factory=Counter)
    flags: list[str] = field(default_factory=list)

    @property
    def n_genuine(self) -> int:
        return sum(self.genuine.values())

    @property
    def n_forged(self) -> int:
        return sum(self.forged.values())


def validate_collection(samples, expected_persons=None,
                        check_genuine_pen_split: bool = False) -> dict[str, PersonReport]:
    """Per-person sample counts with protocol deviations listed as flags.

    Deviations never raise; an ``expected_persons`` entry with no samples gets
    the flag ``"no samples"``.
    """
    reports: dict[str, PersonReport] = {}
    for pid in expected_persons or ():
        reports.setdefault(pid, PersonReport(pid))
    for s in samples:
        rep = reports.setdefault(s.person_id, PersonReport(s.person_id))
        (rep.forged if s.forged else rep.genuine)[s.pen] += 1

    for rep in reports.values():
        if rep.n_genuine == 0 and rep.n_forged == 0:
            rep.flags.append("no samples")
            continue
        if rep.n_genuine != EXPECTED_GENUINE:
            rep.flags.append(f"genuine count {rep.n_genuine} ≠ {EXPECTED_GENUINE}")
        if check_genuine_pen_split:
            bp, pc = rep.genuine["ballpoint"], rep.genuine["pencil"]
            if bp != pc:
                rep.flags.append(f"genuine pen split {bp}/{pc} ≠ even")
        if rep.n_forged != EXPECTED_FORGED:
            rep.flags.append(f"forged count {rep.n_forged} ≠ {EXPECTED_FORGED}")
        bp, pc = rep.forged["ballpoint"], rep.forged["pencil"]
        if (bp, pc) != (EXPECTED_FORGED_PER_PEN, EXPECTED_FORGED_PER_PEN):
            rep.flags.append(f"pen split {bp}/{pc} ≠ {EXPECTED_FORGED_PER_PEN}/{EXPECTED_FORGED_PER_PEN}")
    return reports


# -- sample store -------------------------------------------------------------

SAMPLES_INDEX = "samples.json"


def save_samples(samples, out_dir: str | Path) -> Path:
    """Write crop/mask PNG pairs plus a JSON index; returns the index path."""
    out_dir = Path(out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    records = []
    for i, s in enumerate(samples):
        stem = f"sig_{i:05d}"
        Image.fromarray(s.crop).save(out_dir / f"{stem}_crop.png")
        Image.fromarray(s.mask * 255).save(out_dir / f"{stem}_mask.png")
        records.append({"index": i, "person_id": s.person_id, "forged": s.forged, "pen": s.pen,
                         "crop": f"{stem}_crop.png", "mask": f"{stem}_mask.png"})
    index = out_dir / SAMPLES_INDEX
    index.write_text(json.dumps({"samples": records}, indent=1) + "\n", encoding="utf-8")
    return index


def load_samples(path: str | Path) -> list[SignatureSample]:
    """Load a sample store written by :func:`save_samples` (directory or index file)."""
    path = Path(path)
    if path.is_dir():
        path = path / SAMPLES_INDEX
    root = path.parent
    data = json.loads(path.read_text(encoding="utf-8"))
    samples = []
    for rec in data["samples"]:
        with Image.open(root / rec["crop"]) as im:
            crop = np.asarray(im.convert("L")).copy()
        with Image.open(root / rec["mask"]) as im:
            mask = (np.asarray(im.convert("L")) > 127).astype(np.uint8)
        samples.append(SignatureSample(str(rec["person_id"]), bool(rec["forged"]), rec["pen"], crop, mask))
    return samples
