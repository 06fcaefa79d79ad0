"""Check templates, ink blending, field rendering and check composition."""

from __future__ import annotations

import datetime as dt
from dataclasses import dataclass, field
from pathlib import Path
from typing import Mapping, Sequence

import numpy as np
from PIL import Image, ImageDraw, ImageFont

from . import amounts, inkaug
from ._toml import load_toml
from .geometry import Rect, ink_bbox
from .glyphs import GlyphAtlas, default_atlas
from .inkaug import InkColor, InkDistribution, SignatureLayer

FIELD_CLASSES = ("payee", "date", "amount_courtesy", "amount_legal", "signature")
TEXT_FIELDS = ("payee", "date", "amount_courtesy", "amount_legal")
GENUINE, FORGED = "signature_genuine", "signature_forged"

# alpha below this after resampling is treated as no ink
TEXT_ALPHA_FLOOR = 0.1


@dataclass(frozen=True, eq=False)
class CheckTemplate:
    template_id: str
    background: np.ndarray  # (H, W, 3) uint8
    regions: Mapping[str, Rect]

    def __post_init__(self):
        if self.background.ndim != 3 or self.background.shape[2] != 3:
            raise ValueError("template background must be an RGB raster")
        if set(self.regions) != set(FIELD_CLASSES):
            raise ValueError(f"template {self.template_id!r} must define exactly {FIELD_CLASSES}, "
                             f"got {sorted(self.regions)}")
        h, w = self.background.shape[:2]
        for name, r in self.regions.items():
            if not Rect(*r).inside(w, h):
                raise ValueError(f"template {self.template_id!r}: region {name} {tuple(r)} outside {w}x{h}")
        rects = [tuple(r) for r in self.regions.values()]
        if len(set(rects)) != len(rects):
            raise ValueError(f"template {self.template_id!r}: duplicate regions")
        object.__setattr__(self, "regions", {k: Rect(*v) for k, v in self.regions.items()})
        self.background.setflags(write=False)

    @property
    def size(self) -> tuple[int, int]:
        return self.background.shape[1], self.background.shape[0]


@dataclass(eq=False)
class GeneratedCheck:
    image: np.ndarray
    template_id: str
    person_id: str
    forged: bool
    ink: str
    field_boxes: dict[str, Rect]
    field_inks: dict[str, str] = field(default_factory=dict)
    texts: dict[str, str] = field(default_factory=dict)
    # (width, height); kept when the pixels are dropped after writing
    size: tuple[int, int] | None = None

    def __post_init__(self):
        if self.size is None:
            self.size = (self.image.shape[1], self.image.shape[0])

    @property
    def signature_class(self) -> str:
        return FORGED if self.forged else GENUINE

    @property
    def signature_meta(self) -> tuple[str, bool, str]:
        return self.person_id, self.forged, self.ink


# -- blending and text -----------------------------------------------------------

def blend_layer(background: np.ndarray, layer: SignatureLayer, position: Rect) -> np.ndarray:
    """Darken-only alpha blend of a solid-ink layer at ``position``.

    Per channel: ``min(bg, round(alpha * ink + (1 - alpha) * bg))``.
    """
    h, w = background.shape[:2]
    position = Rect(*position)
    if not position.inside(w, h):
        raise ValueError(f"position {tuple(position)} outside {w}x{h} background")
    if layer.size != (position.w, position.h):
        raise ValueError(f"layer size {layer.size} does not match position {position.w}x{position.h}")
    out = background.copy()
    region = out[position.y:position.y2, position.x:position.x2]
    a = layer.alpha.astype(np.float64)
    if region.ndim == 3:
        a = a[..., None]
        ink = np.asarray(layer.color.rgb, dtype=np.float64)
    else:
        ink = float(np.dot(layer.color.rgb, (0.299, 0.587, 0.114)))
    mixed = np.rint(a * ink + (1.0 - a) * region).astype(np.uint8)
    np.minimum(region, mixed, out=region)
    return out


def render_field(image: np.ndarray, region: Rect, text: str, ink: InkColor,
                 glyph_source: GlyphAtlas | None = None, rng: np.random.Generator | None = None,
                 min_scale: float = 0.3) -> tuple[np.ndarray, Rect]:
    """Draw ``text`` inside ``region``; returns the new image and the tight ink box.

    The text is scaled to fit the region (never above the atlas size). With an
    ``rng`` the size and position are jittered, otherwise the text is
    centered in the region.
    """
    if not text:
        raise ValueError("empty text")
    atlas = glyph_source or default_atlas()
    cov = atlas.coverage(text)
    region = Rect(*region)
    fit = min(region.w / cov.shape[1], region.h / cov.shape[0], 1.0)
    if fit < min_scale:
        raise ValueError(f"text {text!r} needs scale {fit:.3f} < minimum {min_scale} "
                         f"to fit {region.w}x{region.h} region")
    if rng is not None:
        lo = max(min_scale, 0.75 * fit)
        placement = inkaug.sample_placement((cov.shape[1], cov.shape[0]), region, (lo, fit), rng)
    else:
        scale = 0.9 * fit if 0.9 * fit >= min_scale else fit
        sw, sh = inkaug.scaled_size(cov.shape[1], cov.shape[0], scale)
        placement = inkaug.Placement(scale, ((region.w - sw) // 2, (region.h - sh) // 2))
    layer, box = inkaug.apply_placement(SignatureLayer(ink, cov), placement)
    alpha = np.where(layer.alpha >= TEXT_ALPHA_FLOOR, layer.alpha, 0.0).astype(np.float32)
    tight = ink_bbox(alpha > 0)
    if tight is None:
        raise ValueError(f"text {text!r} rendered no visible ink")
    alpha = alpha[tight.y:tight.y2, tight.x:tight.x2]
    pos = tight.shifted(region.x + box.x, region.y + box.y)
    return blend_layer(image, SignatureLayer(ink, alpha), pos), pos


# -- composition ----------------------------------------------------------------

@dataclass
class ComposeConfig:
    ink_distribution: InkDistribution = field(default_factory=InkDistribution)
    palette: Mapping[str, InkColor] = field(default_factory=lambda: dict(inkaug.DEFAULT_PALETTE))
    # fractions of the largest scale at which the signature fits its region
    scale_range: tuple[float, float] = inkaug.DEFAULT_SCALE_RANGE
    date_range: tuple[dt.date, dt.date] = (dt.date(2020, 1, 1), dt.date(2024, 12, 31))
    amount_range: tuple[int, int] = (100, 500_000)
    name_pool: Sequence[str] = tuple(amounts.DEFAULT_NAMES)
    date_format: str = "MM/DD/YYYY"
    text_min_scale: float = 0.3
    glyphs: GlyphAtlas | None = None


def compose_check(template: CheckTemplate, sample, rng: np.random.Generator,
                  config: ComposeConfig | None = None, ink: InkColor | None = None) -> GeneratedCheck:
    """Place a recolored signature and fake field text on a template.

    ``ink`` fixes the signature color; otherwise it is drawn from the config's
    distribution. All other randomness comes from ``rng`` in a fixed order.
    """
    cfg = config or ComposeConfig()
    if ink is None:
        ink = inkaug.sample_ink(cfg.ink_distribution, rng, cfg.palette)
    region = template.regions["signature"]
    fit = inkaug.fitting_scale(sample.size, region)
    lo, hi = cfg.scale_range
    placement = inkaug.sample_placement(sample.size, region, (lo * fit, hi * fit), rng)
    layer, box = inkaug.apply_placement(inkaug.recolor(sample, ink), placement)
    box = box.shifted(region.x, region.y)
    image = blend_layer(np.array(template.background), layer, box)

    sig_class = FORGED if sample.forged else GENUINE
    texts = dict(zip(TEXT_FIELDS, amounts.fake_fields(
        rng, cfg.date_range, cfg.amount_range, cfg.name_pool, cfg.date_format)))
    boxes = {sig_class: box}
    inks = {sig_class: ink.name}
    for name in TEXT_FIELDS:
        text_ink = inkaug.sample_ink(cfg.ink_distribution, rng, cfg.palette)
        image, boxes[name] = render_field(image, template.regions[name], texts[name], text_ink,
                                          cfg.glyphs, rng, cfg.text_min_scale)
        inks[name] = text_ink.name
    return GeneratedCheck(image, template.template_id, sample.person_id, bool(sample.forged),
                          ink.name, boxes, inks, texts)


# -- templates ----------------------------------------------------------------------

DEFAULT_TEMPLATE_SIZE = (1000, 460)

_LAYOUT = {
    "date": (0.66, 0.13, 0.28, 0.11),
    "payee": (0.17, 0.29, 0.55, 0.12),
    "amount_courtesy": (0.77, 0.29, 0.19, 0.12),
    "amount_legal": (0.04, 0.45, 0.78, 0.12),
    "signature": (0.56, 0.63, 0.40, 0.24),
}
_LABELS = {
    "date": "DATE",
    "payee": "PAY TO THE ORDER OF",
    "amount_courtesy": "$",
    "amount_legal": "DOLLARS",
    "signature": "AUTHORIZED SIGNATURE",
}


def synthetic_template(template_id: str, seed: int,
                       size: tuple[int, int] = DEFAULT_TEMPLATE_SIZE) -> CheckTemplate:
    """A procedurally patterned check background with the standard field layout."""
    rng = np.random.default_rng(seed)
    w, h = size
    yy, xx = np.mgrid[0:h, 0:w].astype(np.float64)
    base = rng.uniform(215, 245, size=3)
    tint = rng.uniform(-18, 18, size=3)
    fx, fy, phase = rng.uniform(0.01, 0.05), rng.uniform(0.02, 0.08), rng.uniform(0, 2 * np.pi)
    wave = np.sin(fx * xx + 6 * np.sin(fy * yy + phase)) * np.cos(0.5 * fy * xx - fx * yy)
    bg = base + tint * wave[..., None]
    bg += (rng.uniform(-6, 6, size=3) * (xx / w)[..., None])
    img = Image.fromarray(np.clip(np.rint(bg), 0, 255).astype(np.uint8))

    draw = ImageDraw.Draw(img)
    font = ImageFont.load_default(size=max(10, h // 34))
    line_color = tuple(int(c) for c in np.clip(base - rng.uniform(70, 110), 0, 255))
    regions = {}
    for name, (rx, ry, rw, rh) in _LAYOUT.items():
        jx, jy = rng.uniform(-0.01, 0.01, size=2)
        r = Rect(int((rx + jx) * w), int((ry + jy) * h), int(rw * w), int(rh * h))
        regions[name] = r
        draw.line([(r.x, r.y2 - 2), (r.x2, r.y2 - 2)], fill=line_color, width=1)
        label = _LABELS[name]
        if name == "signature":
            draw.text((r.x + 4, r.y2 + 2), label, fill=line_color, font=font)
        elif name == "amount_legal":
            draw.text((r.x2 + 6, r.y2 - h // 20), label, fill=line_color, font=font)
        else:
            tw = draw.textlength(label, font=font)
            draw.text((max(2, r.x - tw - 6), r.y2 - h // 20), label, fill=line_color, font=font)
    draw.text((int(0.04 * w), int(0.05 * h)), f"BANK {template_id.upper()}", fill=line_color,
              font=ImageFont.load_default(size=max(12, h // 22)))
    draw.rectangle([2, 2, w - 3, h - 3], outline=line_color, width=2)
    return CheckTemplate(template_id, np.asarray(img).copy(), regions)


def builtin_templates(count: int, seed: int = 0) -> list[CheckTemplate]:
    return [synthetic_template(f"t{i:02d}", seed * 1000 + i) for i in range(count)]


def load_templates(path: str | Path) -> list[CheckTemplate]:
    """Read a template definition file (``[[template]]`` tables)."""
    path = Path(path)
    data = load_toml(path)
    templates = []
    for entry in data.get("template", []):
        missing = [k for k in ("id", "background", *FIELD_CLASSES) if k not in entry]
        if missing:
            raise ValueError(f"{path}: template {entry.get('id', '?')!r} missing keys {missing}")
        with Image.open(path.parent / entry["background"]) as im:
            bg = np.asarray(im.convert("RGB")).copy()
        regions = {k: Rect(*(int(v) for v in entry[k])) for k in FIELD_CLASSES}
        templates.append(CheckTemplate(str(entry["id"]), bg, regions))
    if len({t.template_id for t in templates}) != len(templates):
        raise ValueError(f"{path}: duplicate template ids")
    return templates


def save_templates(templates: Sequence[CheckTemplate], path: str | Path) -> Path:
    """Write backgrounds next to ``path`` and a matching template definition file."""
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    lines = []
    for t in templates:
        bg_name = f"{t.template_id}.png"
        Image.fromarray(t.background).save(path.parent / bg_name)
        lines += ["[[template]]", f'id = "{t.template_id}"', f'background = "{bg_name}"']
        lines += [f"{k} = {list(t.regions[k])}" for k in FIELD_CLASSES]
        lines.append("")
    path.write_text("\n".join(lines), encoding="utf-8")
    return path
