"""COCO-format dataset files, split assignment and size-bucket statistics."""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from pathlib import Path
from typing import Sequence

import numpy as np
from PIL import Image

CATEGORIES = [
    {"id": 1, "name": "amount_courtesy", "supercategory": "check_field"},
    {"id": 2, "name": "amount_legal", "supercategory": "check_field"},
    {"id": 3, "name": "date", "supercategory": "check_field"},
    {"id": 4, "name": "payee", "supercategory": "check_field"},
    {"id": 5, "name": "signature_genuine", "supercategory": "signature"},
    {"id": 6, "name": "signature_forged", "supercategory": "signature"},
]
CATEGORY_IDS = {c["name"]: c["id"] for c in CATEGORIES}
CATEGORY_NAMES = {c["id"]: c["name"] for c in CATEGORIES}

# Row labels and order of the size-distribution table.
STATS_ROWS = [
    ("amount_courtesy", "Amount (Courtesy)"),
    ("amount_legal", "Amount (Legal)"),
    ("date", "Date"),
    ("payee", "Payee"),
    ("signature_forged", "Signature (F)"),
    ("signature_genuine", "Signature (G)"),
]

SPLITS = ("train", "val")
# fast zlib setting; dataset images are large and written once
PNG_COMPRESS_LEVEL = 1


class DatasetError(ValueError):
    def __init__(self, violations: Sequence[str]):
        self.violations = list(violations)
        shown = "; ".join(self.violations[:10])
        more = f" (+{len(self.violations) - 10} more)" if len(self.violations) > 10 else ""
        super().__init__(f"{len(self.violations)} dataset violation(s): {shown}{more}")


@dataclass
class ImageRecord:
    id: int
    file_name: str
    width: int
    height: int


@dataclass
class Annotation:
    id: int
    image_id: int
    category_id: int
    bbox: list
    area: float
    attributes: dict = field(default_factory=dict)
    iscrowd: int = 0


@dataclass
class CocoDataset:
    images: list[ImageRecord] = field(default_factory=list)
    annotations: list[Annotation] = field(default_factory=list)
    categories: list[dict] = field(default_factory=lambda: [dict(c) for c in CATEGORIES])
    split: str | None = None

    def to_json(self) -> dict:
        info = {"description": "synthetic bank checks"}
        if self.split is not None:
            info["split"] = self.split
        return {
            "info": info,
            "images": [vars(im) for im in self.images],
            "annotations": [vars(a) for a in self.annotations],
            "categories": self.categories,
        }

    @classmethod
    def from_json(cls, data: dict) -> "CocoDataset":
        try:
            images = [ImageRecord(int(im["id"]), str(im["file_name"]), int(im["width"]), int(im["height"]))
                      for im in data["images"]]
            anns = [Annotation(int(a["id"]), int(a["image_id"]), int(a["category_id"]), list(a["bbox"]),
                               a.get("area", None), dict(a.get("attributes", {})), int(a.get("iscrowd", 0)))
                    for a in data["annotations"]]
            categories = [dict(c) for c in data["categories"]]
        except (KeyError, TypeError, ValueError) as exc:
            raise DatasetError([f"malformed COCO structure: {exc!r}"]) from None
        return cls(images, anns, categories, (data.get("info") or {}).get("split"))


def validate_dataset(ds: CocoDataset) -> list[str]:
    """All invariant violations, each naming the offending id."""
    out = []
    sizes = {}
    for im in ds.images:
        if im.id in sizes:
            out.append(f"duplicate image id {im.id}")
        sizes[im.id] = (im.width, im.height)
    cat_ids = set()
    for c in ds.categories:
        if c["id"] in cat_ids:
            out.append(f"duplicate category id {c['id']}")
        cat_ids.add(c["id"])
    seen = set()
    for a in ds.annotations:
        if a.id in seen:
            out.append(f"duplicate annotation id {a.id}")
        seen.add(a.id)
        if a.image_id not in sizes:
            out.append(f"annotation {a.id}: image_id {a.image_id} does not exist")
        if a.category_id not in cat_ids:
            out.append(f"annotation {a.id}: category_id {a.category_id} does not exist")
        if len(a.bbox) != 4:
            out.append(f"annotation {a.id}: bbox must have 4 values")
            continue
        x, y, w, h = a.bbox
        if w <= 0 or h <= 0:
            out.append(f"annotation {a.id}: bbox {a.bbox} has non-positive size")
        if a.area is None or abs(a.area - w * h) > 1e-6 * max(1.0, abs(w * h)):
            out.append(f"annotation {a.id}: area {a.area} != w*h {w * h}")
        if a.image_id in sizes:
            iw, ih = sizes[a.image_id]
            if x < 0 or y < 0 or x + w > iw or y + h > ih:
                out.append(f"annotation {a.id}: bbox {a.bbox} outside {iw}x{ih} image {a.image_id}")
    return out


def add_check(ds: CocoDataset, check, file_name: str) -> ImageRecord:
    """Append one generated check as an image record plus its annotations (sequential ids)."""
    img_id = len(ds.images) + 1
    ann_id = len(ds.annotations) + 1
    w, h = check.size
    rec = ImageRecord(img_id, file_name, w, h)
    ds.images.append(rec)
    for cls_name in (c["name"] for c in CATEGORIES):
        box = check.field_boxes.get(cls_name)
        if box is None:
            continue
        attrs = {"ink": check.field_inks.get(cls_name, check.ink)}
        if cls_name.startswith("signature"):
            attrs.update(person_id=check.person_id, forged=bool(check.forged))
        bx = [int(v) for v in box]
        ds.annotations.append(Annotation(ann_id, img_id, CATEGORY_IDS[cls_name], bx, bx[2] * bx[3], attrs))
        ann_id += 1
    return rec


def checks_to_dataset(checks, split: str | None = None) -> CocoDataset:
    """COCO model for generated checks; image and annotation ids start at 1."""
    ds = CocoDataset(split=split)
    for i, check in enumerate(checks):
        add_check(ds, check, image_file_name(split, i))
    return ds


def image_file_name(split: str | None, index: int) -> str:
    return f"{split or 'img'}_{index:06d}.png"


def annotation_path(out_dir: str | Path, split: str) -> Path:
    return Path(out_dir) / f"instances_{split}.json"


def save_dataset(ds: CocoDataset, path: str | Path) -> Path:
    violations = validate_dataset(ds)
    if violations:
        raise DatasetError(violations)
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    path.write_text(json.dumps(ds.to_json(), indent=1, ensure_ascii=False) + "\n", encoding="utf-8")
    return path


def write_dataset(checks, split: str, out_dir: str | Path) -> Path:
    """Write ``images/<split>/*.png`` and ``instances_<split>.json``; returns the JSON path.

    Checks may be a lazy iterable; each image is written as soon as it arrives.
    """
    out_dir = Path(out_dir)
    ds = CocoDataset(split=split)
    img_dir = out_dir / "images" / split
    img_dir.mkdir(parents=True, exist_ok=True)
    for i, check in enumerate(checks):
        rec = add_check(ds, check, image_file_name(split, i))
        Image.fromarray(check.image).save(img_dir / rec.file_name, compress_level=PNG_COMPRESS_LEVEL)
    return save_dataset(ds, annotation_path(out_dir, split))


def read_dataset(path: str | Path, strict: bool = True) -> CocoDataset:
    """Parse and validate an annotation file; raises DatasetError on violations if strict."""
    path = Path(path)
    try:
        data = json.loads(path.read_text(encoding="utf-8"))
    except json.JSONDecodeError as exc:
        raise DatasetError([f"{path}: invalid JSON: {exc}"]) from None
    ds = CocoDataset.from_json(data)
    violations = validate_dataset(ds)
    if violations and strict:
        raise DatasetError(violations)
    return ds


# -- splits -----------------------------------------------------------------------

@dataclass(frozen=True)
class SplitConfig:
    genuine_train: int = 2352
    genuine_val: int = 1008
    forged_train: int = 700
    forged_val: int = 300

    def __post_init__(self):
        if min(self.genuine_train, self.genuine_val, self.forged_train, self.forged_val) < 0:
            raise ValueError("split counts must be non-negative")

    def count(self, split: str, forged: bool) -> int:
        return getattr(self, f"{'forged' if forged else 'genuine'}_{split}")

    @property
    def totals(self) -> dict[str, int]:
        return {s: self.count(s, False) + self.count(s, True) for s in SPLITS}

    @property
    def volume(self) -> int:
        return sum(self.totals.values())


DEFAULT_SPLITS = SplitConfig()


class SplitError(ValueError):
    pass


def assign_splits(checks, split_cfg: SplitConfig, rng: np.random.Generator,
                  writer_disjoint: bool = False) -> dict[int, str]:
    """Map item index -> split name with exact per-(split, genuineness) counts.

    Items only need ``forged`` (and ``person_id`` for writer-disjoint mode).
    Indices not in the result are unassigned. In writer-disjoint mode whole
    persons are moved to validation until its quotas can be met.
    """
    groups = {False: [], True: []}
    for i, c in enumerate(checks):
        groups[bool(c.forged)].append(i)
    for forged, idx in groups.items():
        need = split_cfg.count("train", forged) + split_cfg.count("val", forged)
        if need > len(idx):
            kind = "forged" if forged else "genuine"
            raise SplitError(f"requested {need} {kind} checks but only {len(idx)} available")

    if not writer_disjoint:
        out = {}
        for forged in (False, True):
            perm = rng.permutation(np.array(groups[forged], dtype=np.int64))
            n_train = split_cfg.count("train", forged)
            n_val = split_cfg.count("val", forged)
            out.update((int(i), "train") for i in perm[:n_train])
            out.update((int(i), "val") for i in perm[n_train:n_train + n_val])
        return out

    persons = sorted({str(c.person_id) for c in checks})
    order = [persons[i] for i in rng.permutation(len(persons))]
    pools = {s: {False: [], True: []} for s in SPLITS}
    by_person = {p: {False: [], True: []} for p in persons}
    for i, c in enumerate(checks):
        by_person[str(c.person_id)][bool(c.forged)].append(i)
    for p in order:
        val = pools["val"]
        target = "val" if any(len(val[f]) < split_cfg.count("val", f) for f in (False, True)) \
            else "train"
        for f in (False, True):
            pools[target][f].extend(by_person[p][f])
    out = {}
    for split in SPLITS:
        for forged in (False, True):
            pool = sorted(pools[split][forged])
            n = split_cfg.count(split, forged)
            if n > len(pool):
                kind = "forged" if forged else "genuine"
                raise SplitError(f"writer-disjoint split leaves {len(pool)} {kind} checks for {split}, "
                                 f"{n} requested")
            chosen = rng.choice(np.array(pool, dtype=np.int64), size=n, replace=False) if n else []
            out.update((int(i), split) for i in chosen)
    return out


# -- size statistics -----------------------------------------------------------------

@dataclass(frozen=True)
class SizeBuckets:
    small_max: float = 32 ** 2
    medium_max: float = 96 ** 2

    def __post_init__(self):
        if not 0 < self.small_max < self.medium_max:
            raise ValueError("size buckets need 0 < small_max < medium_max")

    def bucket(self, area: float) -> str:
        if area < self.small_max:
            return "small"
        if area < self.medium_max:
            return "medium"
        return "large"

    def ranges(self) -> dict[str, tuple[float, float]]:
        """Half-open area interval per bucket."""
        return {"small": (0.0, self.small_max), "medium": (self.small_max, self.medium_max),
                "large": (self.medium_max, float("inf"))}


BUCKETS = ("small", "medium", "large")


def compute_stats(ds: CocoDataset, buckets: SizeBuckets = SizeBuckets()) -> dict[str, dict[str, int]]:
    """Per-category annotation counts in each size bucket, keyed by category name."""
    names = {c["id"]: c["name"] for c in ds.categories}
    table = {names[cid]: dict.fromkeys(BUCKETS, 0) for cid in sorted(names)}
    for a in ds.annotations:
        table[names[a.category_id]][buckets.bucket(a.area)] += 1
    return table


def format_stats(tables: dict[str, dict[str, dict[str, int]]]) -> str:
    """Render per-split stats tables side by side: Class | Small Medium Large per split."""
    splits = list(tables)
    split_titles = {"train": "Training", "val": "Validation"}
    label_w = max(len(label) for _, label in STATS_ROWS) + 2
    col_w = 8
    head1 = " " * label_w + "".join(f"{split_titles.get(s, s):^{3 * col_w}}" for s in splits)
    head2 = f"{'Class':<{label_w}}" + "".join(f"{b.capitalize():>{col_w}}" for _ in splits for b in BUCKETS)
    lines = [head1.rstrip(), head2, "-" * len(head2)]
    for key, label in STATS_ROWS:
        row = f"{label:<{label_w}}"
        for s in splits:
            counts = tables[s].get(key, dict.fromkeys(BUCKETS, 0))
            row += "".join(f"{counts[b]:>{col_w}}" for b in BUCKETS)
        lines.append(row)
    return "\n".join(lines)
