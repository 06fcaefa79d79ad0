"""Independent reference implementations used only by the tests.

Nothing here imports from checksynth; each oracle is written the slow,
obvious way so that it can check the optimized code paths.
"""

import math


# -- geometry ---------------------------------------------------------------------

def iou_by_cells(a, b):
    """IoU of integer [x, y, w, h] boxes by counting unit grid cells."""
    ca = {(x, y) for x in range(a[0], a[0] + a[2]) for y in range(a[1], a[1] + a[3])}
    cb = {(x, y) for x in range(b[0], b[0] + b[2]) for y in range(b[1], b[1] + b[3])}
    return len(ca & cb) / len(ca | cb)


def window_sum(img, x, y, w, h):
    total = 0
    for j in range(h):
        for i in range(w):
            total += int(img[y + j][x + i])
    return total


# -- morphology -------------------------------------------------------------------

def neighborhood_min(img, radius):
    """Per-pixel minimum over the clamped (2r+1)^2 square, by direct scan."""
    h, w = len(img), len(img[0])
    out = [[None] * w for _ in range(h)]
    for y in range(h):
        for x in range(w):
            best = None
            for yy in range(max(0, y - radius), min(h, y + radius + 1)):
                for xx in range(max(0, x - radius), min(w, x + radius + 1)):
                    v = img[yy][xx]
                    if best is None or v < best:
                        best = v
            out[y][x] = best
    return out


# -- numbers ----------------------------------------------------------------------

_SMALL = "zero one two three four five six seven eight nine ten eleven twelve thirteen fourteen " \
         "fifteen sixteen seventeen eighteen nineteen".split()
_DECADES = {"twenty": 20, "thirty": 30, "forty": 40, "fifty": 50, "sixty": 60, "seventy": 70,
            "eighty": 80, "ninety": 90}


def spell_dollars(n):
    """Recursive digit-group spelling (lowercase)."""
    if n < 20:
        return _SMALL[n]
    if n < 100:
        tens = [k for k, v in _DECADES.items() if v == n - n % 10][0]
        return tens if n % 10 == 0 else f"{tens}-{_SMALL[n % 10]}"
    if n < 1000:
        head = f"{_SMALL[n // 100]} hundred"
        return head if n % 100 == 0 else f"{head} {spell_dollars(n % 100)}"
    for size, name in ((10 ** 6, "million"), (10 ** 3, "thousand")):
        if n >= size:
            head = f"{spell_dollars(n // size)} {name}"
            return head if n % size == 0 else f"{head} {spell_dollars(n % size)}"
    raise AssertionError(n)


def words_to_cents(text):
    """Parse "<Words> and NN/100" back to an integer number of cents."""
    words, frac = text.rsplit(" and ", 1)
    num, den = frac.split("/")
    assert den == "100" and len(num) == 2
    total, group = 0, 0
    for token in words.lower().replace("-", " ").split():
        if token in _SMALL:
            group += _SMALL.index(token)
        elif token in _DECADES:
            group += _DECADES[token]
        elif token == "hundred":
            group *= 100
        elif token == "thousand":
            total += group * 1000
            group = 0
        elif token == "million":
            total += group * 10 ** 6
            group = 0
        else:
            raise ValueError(token)
    return (total + group) * 100 + int(num)


def courtesy_to_cents(text):
    assert text.startswith("$")
    dollars, cents = text[1:].split(".")
    assert len(cents) == 2
    return int(dollars) * 100 + int(cents)


# -- placement ----------------------------------------------------------------------

def feasible_scale_interval(sig_w, sig_h, region_w, region_h, lo, hi, steps=20001):
    """Scan a fine scale grid over [lo, hi]; return (min, max) scale where the box fits."""
    fits = []
    for k in range(steps):
        s = lo + (hi - lo) * k / (steps - 1)
        if sig_w * s <= region_w + 1e-12 and sig_h * s <= region_h + 1e-12:
            fits.append(s)
    return (min(fits), max(fits)) if fits else None


# -- detection evaluation -------------------------------------------------------------

def _iou(a, b):
    x1, y1 = max(a[0], b[0]), max(a[1], b[1])
    x2, y2 = min(a[0] + a[2], b[0] + b[2]), min(a[1] + a[3], b[1] + b[3])
    inter = max(0.0, x2 - x1) * max(0.0, y2 - y1)
    return inter / (a[2] * a[3] + b[2] * b[3] - inter)


def greedy_match(dets, gts, thresh, ignored=None):
    """For each detection (in the given order) pick the best still-free gt.

    Candidates are ranked by (is_ignored, -iou, index), so regular gts win over
    ignored ones, then higher IoU, then lower index.
    """
    ignored = ignored or [False] * len(gts)
    taken = set()
    out = []
    for d in dets:
        cands = sorted((ignored[g], -_iou(d, gts[g]), g) for g in range(len(gts))
                       if g not in taken and _iou(d, gts[g]) >= thresh)
        if cands:
            taken.add(cands[0][2])
            out.append(cands[0][2])
        else:
            out.append(None)
    return out


def interpolated_ap(flags, npos):
    """101-point AP by direct definition: mean over r of max precision at recall >= r."""
    if npos == 0:
        return None
    points = []
    tp = 0
    for k, f in enumerate(flags, start=1):
        tp += f
        points.append((tp / npos, tp / k))
    total = 0.0
    for i in range(101):
        r = i / 100
        ps = [p for rc, p in points if rc >= r - 1e-12]
        total += max(ps) if ps else 0.0
    return total / 101


def brute_force_evaluate(preds, images, annotations, category_ids, sweep, size_iou,
                         small_max=1024, medium_max=9216, max_dets=100):
    """Full COCO-style result from plain lists.

    preds: dicts with image_id, category_id, bbox, score (list order = rank tie-break).
    images: list of image ids in file order. annotations: dicts with image_id,
    category_id, bbox, area.
    """
    area_rng = {"all": (0, math.inf), "small": (0, small_max), "medium": (small_max, medium_max),
                "large": (medium_max, math.inf)}

    def run(cat, area, t):
        lo, hi = area_rng[area]
        scored = []
        npos = 0
        for order, img in enumerate(images):
            g = [a for a in annotations if a["image_id"] == img and a["category_id"] == cat]
            ign = [not (lo <= a["area"] < hi) for a in g]
            npos += sum(not x for x in ign)
            d = [(k, p) for k, p in enumerate(preds) if p["image_id"] == img and p["category_id"] == cat]
            d.sort(key=lambda kp: (-kp[1]["score"], kp[0]))
            d = d[:max_dets]
            m = greedy_match([p["bbox"] for _, p in d], [a["bbox"] for a in g], t, ign)
            for (k, p), gi in zip(d, m):
                if gi is None:
                    a = p["bbox"][2] * p["bbox"][3]
                    if lo <= a < hi:
                        scored.append((-p["score"], order, k, 0))
                elif not ign[gi]:
                    scored.append((-p["score"], order, k, 1))
        scored.sort()
        flags = [s[3] for s in scored]
        ap = interpolated_ap(flags, npos)
        rec = None if npos == 0 else sum(flags) / npos
        return ap, rec

    def mean(vals):
        vals = [v for v in vals if v is not None]
        return sum(vals) / len(vals) if vals else None

    res = {}
    all_ap = {c: [run(c, "all", t)[0] for t in sweep] for c in category_ids}
    res["map"] = mean(v for c in category_ids for v in all_ap[c])
    res["per_class"] = {c: mean(all_ap[c]) for c in category_ids}
    for b in ("small", "medium", "large"):
        pairs = [run(c, b, size_iou) for c in category_ids]
        res[f"ap_{b}"] = mean(p[0] for p in pairs)
        res[f"ar_{b}"] = mean(p[1] for p in pairs)
    return res


def random_micro_instance(rng, n_cats=3):
    """Random (images, annotations, preds) with <=5 images and <=4 gt boxes each.

    Box sizes span all three area buckets; predictions mix jittered copies of
    ground truth with clutter, and scores are coarse so ties occur.
    """
    images = list(range(1, int(rng.integers(1, 6)) + 1))
    sides = [4, 20, 40, 80, 120]

    def box():
        w, h = int(rng.choice(sides)) + int(rng.integers(0, 8)), int(rng.choice(sides)) + int(rng.integers(0, 8))
        return [int(rng.integers(0, 300 - w)), int(rng.integers(0, 300 - h)), w, h]

    annotations, preds = [], []
    for img in images:
        for _ in range(int(rng.integers(0, 5))):
            b = box()
            annotations.append({"id": len(annotations) + 1, "image_id": img,
                                "category_id": int(rng.integers(1, n_cats + 1)), "bbox": b, "area": b[2] * b[3]})
    for a in annotations:
        if rng.random() < 0.75:
            x, y, w, h = a["bbox"]
            dx, dy = (int(v) for v in rng.integers(-w // 4 - 1, w // 4 + 2, size=2))
            b = [x + dx, y + dy, max(1, w + int(rng.integers(-2, 3))), max(1, h + int(rng.integers(-2, 3)))]
            preds.append({"image_id": a["image_id"], "category_id": a["category_id"], "bbox": b,
                          "score": round(float(rng.random()), 1)})
    for _ in range(int(rng.integers(0, 6))):
        preds.append({"image_id": int(rng.choice(images)), "category_id": int(rng.integers(1, n_cats + 1)),
                      "bbox": box(), "score": round(float(rng.random()), 1)})
    order = rng.permutation(len(preds))
    return images, annotations, [preds[i] for i in order]
