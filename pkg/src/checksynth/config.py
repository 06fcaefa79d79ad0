"""Generation config: a TOML file with documented defaults, overridable by flags.

Example (every key optional; relative paths resolve against the file)::

    master_seed = 1234
    samples_dir = "samples"          # output of `checksynth extract`
    output_dir = "dataset"
    templates = "templates.toml"     # omit to use procedural templates
    builtin_templates = 5
    augmentations_per_signature = 5
    checks_per_augmentation = 5
    writer_disjoint = false
    workers = 1

    [ink]
    weights = { black = 0.2, dark_gray = 0.2, dark_blue = 0.3, red = 0.2, green = 0.1 }
    rgb = { black = [20, 20, 20] }

    [placement]
    scale_range = [0.6, 0.95]

    [splits]
    genuine_train = 2352
    genuine_val = 1008
    forged_train = 700
    forged_val = 300

    [fields]
    date_start = "2020-01-01"
    date_end = "2024-12-31"
    date_format = "MM/DD/YYYY"
    amount_min = 100
    amount_max = 500000
    names = ["Alice Moreno", "..."]   # or names_file = "names.txt"
    glyph_atlas = "glyphs/"           # omit to use the bundled atlas
    text_min_scale = 0.3
"""

from __future__ import annotations

import datetime as dt
import os
from dataclasses import dataclass, field, fields, replace
from pathlib import Path

from . import amounts, inkaug
from ._toml import load_toml
from .cocoio import SplitConfig

CONFIG_ENV = "CHECKSYNTH_CONFIG"


class ConfigError(ValueError):
    pass


@dataclass
class GenerationConfig:
    master_seed: int = 0
    samples_dir: Path | None = None
    output_dir: Path = Path("dataset")
    templates: Path | None = None
    builtin_templates: int = 5
    ink_weights: dict = field(default_factory=lambda: dict(inkaug.DEFAULT_WEIGHTS))
    ink_rgb: dict = field(default_factory=dict)
    scale_range: tuple[float, float] = inkaug.DEFAULT_SCALE_RANGE
    augmentations_per_signature: int = inkaug.DEFAULT_AUGMENTATIONS
    checks_per_augmentation: int = 5
    splits: SplitConfig = field(default_factory=SplitConfig)
    date_range: tuple[dt.date, dt.date] = (dt.date(2020, 1, 1), dt.date(2024, 12, 31))
    date_format: str = "MM/DD/YYYY"
    amount_range: tuple[int, int] = (100, 500_000)
    name_pool: list[str] = field(default_factory=lambda: list(amounts.DEFAULT_NAMES))
    glyph_atlas: Path | None = None
    text_min_scale: float = 0.3
    writer_disjoint: bool = False
    workers: int = 1

    def check(self) -> None:
        """Static checks; asset existence is verified again at run time."""
        if not 0 <= self.master_seed < 2 ** 64:
            raise ConfigError("master_seed must be a 64-bit unsigned integer")
        if self.augmentations_per_signature < 1 or self.checks_per_augmentation < 1:
            raise ConfigError("augmentations_per_signature and checks_per_augmentation must be >= 1")
        lo, hi = self.scale_range
        if not 0 < lo <= hi <= 1:
            raise ConfigError("scale_range must satisfy 0 < lo <= hi <= 1 (fractions of the fitting scale)")
        if self.templates is None and self.builtin_templates < 1:
            raise ConfigError("need a templates file or builtin_templates >= 1")
        if self.workers < 1:
            raise ConfigError("workers must be >= 1")
        if not self.name_pool:
            raise ConfigError("name pool is empty")
        if self.date_format not in amounts.DATE_FORMATS:
            raise ConfigError(f"date_format must be one of {list(amounts.DATE_FORMATS)}")
        if self.date_range[0] > self.date_range[1] or not 0 <= self.amount_range[0] <= self.amount_range[1]:
            raise ConfigError("date and amount ranges must be ordered and non-negative")
        try:
            inkaug.InkDistribution(self.ink_weights)
            inkaug.make_palette(self.ink_rgb)
        except ValueError as exc:
            raise ConfigError(str(exc)) from None


def _path(base: Path, value) -> Path | None:
    if value is None:
        return None
    p = Path(value).expanduser()
    return p if p.is_absolute() else base / p


def config_from_dict(data: dict, base: Path = Path(".")) -> GenerationConfig:
    cfg = GenerationConfig()
    known = {"master_seed", "samples_dir", "output_dir", "templates", "builtin_templates",
             "augmentations_per_signature", "checks_per_augmentation", "writer_disjoint", "workers",
             "ink", "placement", "splits", "fields"}
    unknown = set(data) - known
    if unknown:
        raise ConfigError(f"unknown config keys: {sorted(unknown)}")
    try:
        for key in ("master_seed", "builtin_templates", "augmentations_per_signature",
                    "checks_per_augmentation", "workers"):
            if key in data:
                setattr(cfg, key, int(data[key]))
        if "writer_disjoint" in data:
            cfg.writer_disjoint = bool(data["writer_disjoint"])
        for key in ("samples_dir", "output_dir", "templates"):
            if key in data:
                setattr(cfg, key, _path(base, data[key]))
        ink = data.get("ink", {})
        if "weights" in ink:
            cfg.ink_weights = {k: float(v) for k, v in ink["weights"].items()}
        if "rgb" in ink:
            cfg.ink_rgb = {k: tuple(int(c) for c in v) for k, v in ink["rgb"].items()}
        if "scale_range" in data.get("placement", {}):
            lo, hi = data["placement"]["scale_range"]
            cfg.scale_range = (float(lo), float(hi))
        if "splits" in data:
            cfg.splits = replace(cfg.splits, **{k: int(v) for k, v in data["splits"].items()})
        f = data.get("fields", {})
        start = f.get("date_start", cfg.date_range[0])
        end = f.get("date_end", cfg.date_range[1])
        cfg.date_range = (amounts._as_date(start), amounts._as_date(end))
        cfg.date_format = f.get("date_format", cfg.date_format)
        cfg.amount_range = (int(f.get("amount_min", cfg.amount_range[0])),
                            int(f.get("amount_max", cfg.amount_range[1])))
        if "names" in f:
            cfg.name_pool = [str(n) for n in f["names"]]
        if "names_file" in f:
            text = _path(base, f["names_file"]).read_text(encoding="utf-8")
            cfg.name_pool = [line.strip() for line in text.splitlines() if line.strip()]
        if "glyph_atlas" in f:
            cfg.glyph_atlas = _path(base, f["glyph_atlas"])
        if "text_min_scale" in f:
            cfg.text_min_scale = float(f["text_min_scale"])
    except ConfigError:
        raise
    except (TypeError, ValueError) as exc:
        raise ConfigError(f"invalid config value: {exc}") from None
    cfg.check()
    return cfg


def load_config(path: str | Path | None = None) -> GenerationConfig:
    """Load ``path``, else the file named by $CHECKSYNTH_CONFIG, else defaults."""
    if path is None:
        path = os.environ.get(CONFIG_ENV) or None
    if path is None:
        return GenerationConfig()
    path = Path(path)
    if not path.is_file():
        raise ConfigError(f"config file not found: {path}")
    return config_from_dict(load_toml(path), path.parent)


def config_summary(cfg: GenerationConfig) -> dict:
    """JSON-friendly view of the resolved config."""
    out = {}
    for f in fields(cfg):
        v = getattr(cfg, f.name)
        if isinstance(v, Path):
            v = str(v)
        elif isinstance(v, SplitConfig):
            v = {k.name: getattr(v, k.name) for k in fields(v)}
        elif isinstance(v, tuple):
            v = [x.isoformat() if isinstance(x, dt.date) else x for x in v]
        out[f.name] = v
    return out
