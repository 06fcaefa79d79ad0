"""End-to-end dataset generation: plan candidates, assign splits, compose, write.

Every signature sample gets ``augmentations_per_signature`` ink draws, and each
augmentation is paired with ``checks_per_augmentation`` randomly chosen
templates. That candidate pool is split to the exact configured counts, and
only selected candidates are rendered. Seeds (see ``seeds.derive_seed``):

* ink of augmentation a of sample s: ``(master, "ink", s, a)``
* templates for that augmentation:  ``(master, "checks", s, a)``
* split assignment:                  ``(master, "split")``
* image i of a split:                ``(master, <split>, i)``
"""

from __future__ import annotations

import dataclasses
import json
import logging
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass
from pathlib import Path

from PIL import Image

from . import cocoio, composer, inkaug, seeds
from .config import ConfigError, GenerationConfig, config_summary
from .glyphs import GlyphAtlas
from .cocoio import PNG_COMPRESS_LEVEL
from .sheets import load_samples

log = logging.getLogger(__name__)


@dataclass(frozen=True)
class Candidate:
    sample_index: int
    augmentation: int
    template_index: int
    forged: bool
    person_id: str
    ink: str


def plan_candidates(samples, n_templates: int, cfg: GenerationConfig) -> list[Candidate]:
    dist = inkaug.InkDistribution(cfg.ink_weights)
    palette = inkaug.make_palette(cfg.ink_rgb)
    out = []
    for s, sample in enumerate(samples):
        for a in range(cfg.augmentations_per_signature):
            ink = inkaug.sample_ink(dist, seeds.stream(cfg.master_seed, "ink", s, a), palette)
            rng = seeds.stream(cfg.master_seed, "checks", s, a)
            k = cfg.checks_per_augmentation
            picks = rng.choice(n_templates, size=k, replace=False) if k <= n_templates \
                else rng.integers(n_templates, size=k)
            out.extend(Candidate(s, a, int(t), bool(sample.forged), sample.person_id, ink.name)
                       for t in picks)
    return out


def compose_config(cfg: GenerationConfig) -> composer.ComposeConfig:
    return composer.ComposeConfig(
        ink_distribution=inkaug.InkDistribution(cfg.ink_weights),
        palette=inkaug.make_palette(cfg.ink_rgb),
        scale_range=cfg.scale_range,
        date_range=cfg.date_range,
        amount_range=cfg.amount_range,
        name_pool=tuple(cfg.name_pool),
        date_format=cfg.date_format,
        text_min_scale=cfg.text_min_scale,
        glyphs=GlyphAtlas.load(cfg.glyph_atlas) if cfg.glyph_atlas else None,
    )


def load_templates(cfg: GenerationConfig) -> list[composer.CheckTemplate]:
    if cfg.templates is not None:
        if not cfg.templates.is_file():
            raise ConfigError(f"templates file not found: {cfg.templates}")
        return composer.load_templates(cfg.templates)
    return composer.builtin_templates(cfg.builtin_templates, seed=0)


# state shared with worker processes
_ctx: dict = {}


def _init_worker(samples, templates, ccfg, master_seed):
    _ctx.update(samples=samples, templates=templates, ccfg=ccfg, master_seed=master_seed)


def _render(job):
    split, index, cand, path = job
    rng = seeds.stream(_ctx["master_seed"], split, index)
    ink = _ctx["ccfg"].palette[cand.ink]
    check = composer.compose_check(_ctx["templates"][cand.template_index],
                                   _ctx["samples"][cand.sample_index], rng, _ctx["ccfg"], ink=ink)
    Image.fromarray(check.image).save(path, compress_level=PNG_COMPRESS_LEVEL)
    return dataclasses.replace(check, image=None)


def generate(cfg: GenerationConfig) -> dict:
    """Generate the dataset described by ``cfg``; returns the summary also written to disk."""
    cfg.check()
    if cfg.samples_dir is None:
        raise ConfigError("samples_dir is not set")
    samples = load_samples(cfg.samples_dir)
    templates = load_templates(cfg)
    ccfg = compose_config(cfg)

    candidates = plan_candidates(samples, len(templates), cfg)
    assignment = cocoio.assign_splits(candidates, cfg.splits, seeds.stream(cfg.master_seed, "split"),
                                      writer_disjoint=cfg.writer_disjoint)
    out_dir = Path(cfg.output_dir)
    jobs = {}
    for split in cocoio.SPLITS:
        chosen = sorted(i for i, s in assignment.items() if s == split)
        img_dir = out_dir / "images" / split
        img_dir.mkdir(parents=True, exist_ok=True)
        jobs[split] = [(split, k, candidates[i], img_dir / cocoio.image_file_name(split, k))
                       for k, i in enumerate(chosen)]

    summary = {"master_seed": cfg.master_seed, "candidates": len(candidates), "splits": {}}
    _init_worker(samples, templates, ccfg, cfg.master_seed)
    pool = ProcessPoolExecutor(cfg.workers, initializer=_init_worker,
                               initargs=(samples, templates, ccfg, cfg.master_seed)) \
        if cfg.workers > 1 else None
    try:
        for split, split_jobs in jobs.items():
            ds = cocoio.CocoDataset(split=split)
            results = pool.map(_render, split_jobs, chunksize=16) if pool else map(_render, split_jobs)
            for (_, k, _, path), check in zip(split_jobs, results):
                cocoio.add_check(ds, check, path.name)
            cocoio.save_dataset(ds, cocoio.annotation_path(out_dir, split))
            n_forged = sum(job[2].forged for job in split_jobs)
            summary["splits"][split] = {"genuine": len(split_jobs) - n_forged, "forged": n_forged,
                                        "total": len(split_jobs), "annotations": len(ds.annotations)}
            log.info("%s: %d images", split, len(split_jobs))
    finally:
        if pool:
            pool.shutdown()

    (out_dir / "summary.json").write_text(json.dumps(summary, indent=1) + "\n", encoding="utf-8")
    (out_dir / "generation_config.json").write_text(
        json.dumps(config_summary(cfg), indent=1, default=str) + "\n", encoding="utf-8")
    return summary
