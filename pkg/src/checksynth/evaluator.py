"""COCO-style detection scoring for check-field detectors.

Detections are matched greedily per (image, category) in descending score
order. Average precision uses 101-point interpolation over the recall grid
0.00, 0.01, ..., 1.00. Size-restricted metrics follow the COCO convention:
ground truths outside the size bucket are ignored, as are detections matched
to them and unmatched detections whose own area falls outside the bucket.

Ranking ties (equal scores) are broken by image order in the ground-truth
file, then by the order of detections within the prediction list.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field
from pathlib import Path
from typing import Sequence

import numpy as np

from .cocoio import BUCKETS, CATEGORY_NAMES, CocoDataset, SizeBuckets

# i/100 is exact where linspace drifts (e.g. 0.30000000000000004 would miss recall 3/10)
RECALL_GRID = np.arange(101) / 100
DEFAULT_SWEEP = tuple(round(0.5 + 0.05 * i, 2) for i in range(10))


@dataclass(frozen=True)
class Detection:
    image_id: int
    category_id: int
    bbox: tuple[float, float, float, float]
    score: float

    def __post_init__(self):
        if len(self.bbox) != 4 or self.bbox[2] <= 0 or self.bbox[3] <= 0:
            raise ValueError(f"detection bbox {self.bbox} must be [x, y, w, h] with positive size")
        if not 0.0 <= self.score <= 1.0:
            raise ValueError(f"detection score {self.score} outside [0, 1]")


@dataclass(frozen=True)
class EvalConfig:
    iou_sweep: tuple[float, ...] = DEFAULT_SWEEP
    size_metric_iou: float = 0.5
    buckets: SizeBuckets = SizeBuckets()
    max_dets: int = 100
    # "sweep": per-class AP averaged over iou_sweep; "single": AP at size_metric_iou
    per_class: str = "sweep"

    def __post_init__(self):
        sweep = tuple(float(t) for t in self.iou_sweep)
        if not sweep or any(not 0 < t <= 1 for t in sweep) or \
                any(b <= a for a, b in zip(sweep, sweep[1:])):
            raise ValueError("iou_sweep must be strictly increasing within (0, 1]")
        object.__setattr__(self, "iou_sweep", sweep)
        if not 0 < self.size_metric_iou <= 1:
            raise ValueError("size_metric_iou must be within (0, 1]")
        if self.max_dets < 1:
            raise ValueError("max_dets must be >= 1")
        if self.per_class not in ("sweep", "single"):
            raise ValueError("per_class must be 'sweep' or 'single'")


@dataclass
class EvalResult:
    """Metric values in [0, 1]; ``None`` where no ground truth defines them."""

    map: float | None
    ap_small: float | None
    ap_medium: float | None
    ap_large: float | None
    ar_small: float | None
    ar_medium: float | None
    ar_large: float | None
    per_class_ap: dict[str, float | None] = field(default_factory=dict)

    def to_dict(self) -> dict:
        return {"mAP": self.map, "AP_S": self.ap_small, "AP_M": self.ap_medium, "AP_L": self.ap_large,
                "AR_S": self.ar_small, "AR_M": self.ar_medium, "AR_L": self.ar_large,
                "per_class_AP": dict(self.per_class_ap)}


def iou(a, b) -> float:
    """Intersection over union of two [x, y, w, h] boxes."""
    ax, ay, aw, ah = a
    bx, by, bw, bh = b
    if aw <= 0 or ah <= 0 or bw <= 0 or bh <= 0:
        raise ValueError("iou of a zero-area box is undefined")
    iw = min(ax + aw, bx + bw) - max(ax, bx)
    ih = min(ay + ah, by + bh) - max(ay, by)
    if iw <= 0 or ih <= 0:
        return 0.0
    inter = iw * ih
    return inter / (aw * ah + bw * bh - inter)


def match_greedy(dets: Sequence, gts: Sequence, thresh: float,
                 gt_ignore: Sequence[bool] | None = None) -> tuple[list[int | None], list[bool]]:
    """Match score-sorted detection boxes to ground-truth boxes.

    Each detection takes the unmatched ground truth with the highest IoU that is
    at least ``thresh``; equal IoUs go to the lower index. Ignored ground truths
    are only considered when no regular one qualifies. Returns the matched gt
    index (or None) per detection and the matched flag per ground truth.
    """
    ignore = list(gt_ignore) if gt_ignore is not None else [False] * len(gts)
    matched = [False] * len(gts)
    result: list[int | None] = []
    for d in dets:
        choice = None
        for want_ignored in (False, True):
            best_iou = -1.0
            for g, box in enumerate(gts):
                if matched[g] or ignore[g] != want_ignored:
                    continue
                v = iou(d, box)
                if v >= thresh and v > best_iou:
                    best_iou, choice = v, g
            if choice is not None:
                break
        if choice is not None:
            matched[choice] = True
        result.append(choice)
    return result, matched


def average_precision(tp_flags: Sequence[bool], num_gt: int) -> float | None:
    """101-point interpolated AP of a score-ranked TP/FP sequence; None if num_gt is 0."""
    if num_gt < 0:
        raise ValueError("num_gt must be non-negative")
    if num_gt == 0:
        return None
    flags = np.asarray(tp_flags, dtype=bool)
    if flags.size == 0:
        return 0.0
    tp = np.cumsum(flags)
    fp = np.cumsum(~flags)
    recall = tp / num_gt
    precision = tp / (tp + fp)
    # precision envelope: best precision at any recall at least this high
    precision = np.maximum.accumulate(precision[::-1])[::-1]
    idx = np.searchsorted(recall, RECALL_GRID, side="left")
    sampled = np.where(idx < precision.size, precision[np.minimum(idx, precision.size - 1)], 0.0)
    return float(sampled.mean())


def load_predictions(path: str | Path) -> list[Detection]:
    """Read a COCO results file (JSON array of image_id/category_id/bbox/score)."""
    data = json.loads(Path(path).read_text(encoding="utf-8"))
    if not isinstance(data, list):
        raise ValueError(f"{path}: expected a JSON array of detections")
    dets = []
    for i, d in enumerate(data):
        try:
            dets.append(Detection(int(d["image_id"]), int(d["category_id"]),
                                  tuple(float(v) for v in d["bbox"]), float(d["score"])))
        except (KeyError, TypeError, ValueError) as exc:
            raise ValueError(f"{path}: detection #{i}: {exc}") from None
    return dets


def _mean_defined(values) -> float | None:
    vals = [v for v in values if v is not None]
    return float(np.mean(vals)) if vals else None


def evaluate(preds: Sequence[Detection], gt: CocoDataset, cfg: EvalConfig = EvalConfig()) -> EvalResult:
    image_order = {im.id: k for k, im in enumerate(gt.images)}
    cat_ids = sorted(c["id"] for c in gt.categories)
    cat_names = {c["id"]: c.get("name", CATEGORY_NAMES.get(c["id"], str(c["id"]))) for c in gt.categories}
    for p in preds:
        if p.category_id not in cat_names:
            raise ValueError(f"unknown category id {p.category_id} in predictions")
        if p.image_id not in image_order:
            raise ValueError(f"unknown image id {p.image_id} in predictions")

    gts: dict[tuple[int, int], list] = {}
    for a in gt.annotations:
        gts.setdefault((a.image_id, a.category_id), []).append(a)
    dts: dict[tuple[int, int], list[tuple[int, Detection]]] = {}
    for rank, p in enumerate(preds):
        dts.setdefault((p.image_id, p.category_id), []).append((rank, p))

    ranges = {"all": (0.0, math.inf), **cfg.buckets.ranges()}
    thresholds = sorted(set(cfg.iou_sweep) | {cfg.size_metric_iou})

    def accumulate(cat: int, area: str, thresh: float):
        lo, hi = ranges[area]
        entries = []  # (score, image order, det rank, is_tp)
        num_gt = 0
        for img in gt.images:
            g = gts.get((img.id, cat), [])
            d = sorted(dts.get((img.id, cat), []), key=lambda rd: (-rd[1].score, rd[0]))[:cfg.max_dets]
            g_ign = [not lo <= a.area < hi for a in g]
            num_gt += g_ign.count(False)
            match, _ = match_greedy([p.bbox for _, p in d], [a.bbox for a in g], thresh, g_ign)
            for (rank, p), m in zip(d, match):
                if m is not None:
                    if g_ign[m]:
                        continue
                    entries.append((-p.score, image_order[img.id], rank, True))
                else:
                    if not lo <= p.bbox[2] * p.bbox[3] < hi:
                        continue
                    entries.append((-p.score, image_order[img.id], rank, False))
        entries.sort()
        flags = [e[3] for e in entries]
        ap = average_precision(flags, num_gt)
        rec = None if num_gt == 0 else sum(flags) / num_gt
        return ap, rec

    ap: dict[tuple[int, str, float], float | None] = {}
    ar: dict[tuple[int, str, float], float | None] = {}
    for c in cat_ids:
        for t in thresholds:
            ap[c, "all", t], ar[c, "all", t] = accumulate(c, "all", t)
        for b in BUCKETS:
            t = cfg.size_metric_iou
            ap[c, b, t], ar[c, b, t] = accumulate(c, b, t)

    per_class = {}
    for c in cat_ids:
        if cfg.per_class == "sweep":
            per_class[cat_names[c]] = _mean_defined(ap[c, "all", t] for t in cfg.iou_sweep)
        else:
            per_class[cat_names[c]] = ap[c, "all", cfg.size_metric_iou]
    t = cfg.size_metric_iou
    return EvalResult(
        map=_mean_defined(ap[c, "all", s] for c in cat_ids for s in cfg.iou_sweep),
        ap_small=_mean_defined(ap[c, "small", t] for c in cat_ids),
        ap_medium=_mean_defined(ap[c, "medium", t] for c in cat_ids),
        ap_large=_mean_defined(ap[c, "large", t] for c in cat_ids),
        ar_small=_mean_defined(ar[c, "small", t] for c in cat_ids),
        ar_medium=_mean_defined(ar[c, "medium", t] for c in cat_ids),
        ar_large=_mean_defined(ar[c, "large", t] for c in cat_ids),
        per_class_ap=per_class,
    )


# -- reporting -------------------------------------------------------------------

OVERALL_COLUMNS = [("mAP", "map"), ("AP_S", "ap_small"), ("AP_M", "ap_medium"), ("AP_L", "ap_large"),
                   ("AR_S", "ar_small"), ("AR_M", "ar_medium"), ("AR_L", "ar_large")]
CLASS_COLUMNS = [("Genuine", "signature_genuine"), ("Forged", "signature_forged"), ("Date", "date"),
                 ("Courtesy", "amount_courtesy"), ("Legal", "amount_legal"), ("Payee", "payee"),
                 ("Overall", None)]
MISSING = "—"


def _fmt(v: float | None) -> str:
    return MISSING if v is None else f"{100.0 * v:.1f}"


def report(result: EvalResult, layout: str = "overall", label: str = "Model") -> str:
    """Plain-text table: ``overall`` (mAP, AP/AR by size) or ``class_wise``."""
    w0 = max(len(label), 12) + 2
    if layout == "overall":
        cols = [(h, getattr(result, attr)) for h, attr in OVERALL_COLUMNS]
        header = f"{'Method':<{w0}}" + "".join(f"{h:>8}" for h, _ in cols)
        row = f"{label:<{w0}}" + "".join(f"{_fmt(v):>8}" for _, v in cols)
        return "\n".join([header, "-" * len(header), row])
    if layout == "class_wise":
        cols = [(h, result.map if key is None else result.per_class_ap.get(key)) for h, key in CLASS_COLUMNS]
        cw = 10
        group = f"{'':<{w0}}{'Signature':^{2 * cw}}{'':>{cw}}{'Amount':^{2 * cw}}"
        header = f"{'Method':<{w0}}" + "".join(f"{h:>{cw}}" for h, _ in cols)
        row = f"{label:<{w0}}" + "".join(f"{_fmt(v):>{cw}}" for _, v in cols)
        return "\n".join([group.rstrip(), header, "-" * len(header), row])
    raise ValueError(f"unknown layout {layout!r}")
