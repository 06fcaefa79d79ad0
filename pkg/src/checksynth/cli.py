"""Command-line entry point: ``checksynth <subcommand> ...``."""

from __future__ import annotations

import argparse
import json
import logging
import sys
from dataclasses import replace
from pathlib import Path

from . import cocoio, morphology, sheets
from .config import CONFIG_ENV, ConfigError, load_config
from .evaluator import EvalConfig, evaluate, load_predictions, report

log = logging.getLogger("checksynth")


def cmd_extract(manifest, sheets_dir, out_dir, threshold: int = sheets.DEFAULT_THRESHOLD) -> int:
    """Crop and binarize every manifest box into a sample store; returns the sample count."""
    sheets_dir = Path(sheets_dir)
    annotations = sheets.load_manifest(manifest, sheets_dir)
    samples, cache = [], {}
    for ann in annotations:
        if ann.sheet_id not in cache:
            cache = {ann.sheet_id: sheets.load_sheet(sheets_dir / ann.sheet_id)}
        raster = cache[ann.sheet_id]
        t = ann.threshold if ann.threshold is not None else threshold
        samples.extend(sheets.extract_sample(raster, box, ann.person_id, t) for box in ann.boxes)
    sheets.save_samples(samples, out_dir)
    return len(samples)


def cmd_generate(config_path=None, **overrides) -> dict:
    """Run generation; keyword overrides (non-None) replace config file values."""
    from .pipeline import generate

    cfg = load_config(config_path)
    cfg = replace(cfg, **{k: v for k, v in overrides.items() if v is not None})
    return generate(cfg)


def _dataset_files(path: Path) -> dict[str, Path]:
    if path.is_dir():
        found = {s: cocoio.annotation_path(path, s) for s in cocoio.SPLITS}
        found = {s: p for s, p in found.items() if p.is_file()}
        if not found:
            raise FileNotFoundError(f"no instances_<split>.json files in {path}")
        return found
    if not path.is_file():
        raise FileNotFoundError(f"dataset not found: {path}")
    return {path.stem.removeprefix("instances_"): path}


def cmd_stats(dataset_path, buckets: cocoio.SizeBuckets = cocoio.SizeBuckets()) -> dict:
    """Size-bucket table per split for a dataset directory or a single annotation file."""
    return {split: cocoio.compute_stats(cocoio.read_dataset(p), buckets)
            for split, p in _dataset_files(Path(dataset_path)).items()}


def cmd_dilate(in_dir, out_dir, radius: int = 1, iterations: int = 1) -> morphology.PreprocessResult:
    return morphology.preprocess_corpus(in_dir, out_dir, morphology.StructuringElement(radius, iterations))


def cmd_evaluate(pred_path, gt_path, cfg: EvalConfig = EvalConfig()):
    return evaluate(load_predictions(pred_path), cocoio.read_dataset(gt_path), cfg)


def _build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="checksynth", description="Synthetic bank-check dataset toolkit.")
    ap.add_argument("-v", "--verbose", action="store_true")
    sub = ap.add_subparsers(dest="command", required=True)

    p = sub.add_parser("extract", help="crop and binarize signatures from collection sheets")
    p.add_argument("manifest")
    p.add_argument("sheets_dir")
    p.add_argument("out_dir")
    p.add_argument("--threshold", type=int, default=sheets.DEFAULT_THRESHOLD,
                   help="luminance threshold for ink (default %(default)s); the manifest may override per sheet")

    p = sub.add_parser("generate", help="compose checks and write COCO splits")
    p.add_argument("--config", help=f"TOML config (default: ${CONFIG_ENV})")
    p.add_argument("--seed", type=int, dest="master_seed")
    p.add_argument("--samples", type=Path, dest="samples_dir")
    p.add_argument("--output", type=Path, dest="output_dir")
    p.add_argument("--templates", type=Path)
    p.add_argument("--workers", type=int)
    p.add_argument("--splits", metavar="GT,GV,FT,FV",
                   help="genuine train/val and forged train/val counts")

    p = sub.add_parser("stats", help="size-bucket annotation counts per class")
    p.add_argument("dataset", help="dataset directory or instances_<split>.json")
    p.add_argument("--json", action="store_true", help="print JSON instead of a table")

    p = sub.add_parser("dilate", help="thicken dark strokes in every image of a directory")
    p.add_argument("in_dir")
    p.add_argument("out_dir")
    p.add_argument("--radius", type=int, default=1)
    p.add_argument("--iterations", type=int, default=1)

    p = sub.add_parser("evaluate", help="score a COCO results file against ground truth")
    p.add_argument("predictions")
    p.add_argument("ground_truth")
    p.add_argument("--layout", choices=["overall", "class_wise", "both"], default="both")
    p.add_argument("--per-class", choices=["sweep", "single"], default="sweep",
                   help="per-class AP over the IoU sweep or at the single size-metric IoU")
    p.add_argument("--size-iou", type=float, default=0.5)
    p.add_argument("--max-dets", type=int, default=100)
    p.add_argument("--label", default="Model")
    p.add_argument("--json-out", type=Path, help="also write the result as JSON")

    p = sub.add_parser("validate", help="check a sample store or a COCO annotation file")
    g = p.add_mutually_exclusive_group(required=True)
    g.add_argument("--samples", help="sample store directory")
    g.add_argument("--dataset", help="dataset directory or annotation file")
    p.add_argument("--strict", action="store_true",
                   help="exit with status 2 when any flag or violation is reported")

    p = sub.add_parser("demo", help="write procedurally drawn collection sheets and a manifest")
    p.add_argument("out_dir")
    p.add_argument("--persons", type=int, default=19)
    p.add_argument("--seed", type=int, default=0)
    return ap


def main(argv=None) -> int:
    args = _build_parser().parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s %(name)s: %(message)s")
    try:
        return _dispatch(args)
    except (OSError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


def _dispatch(args) -> int:
    if args.command == "extract":
        n = cmd_extract(args.manifest, args.sheets_dir, args.out_dir, args.threshold)
        print(f"extracted {n} samples into {args.out_dir}")
    elif args.command == "generate":
        splits = None
        if args.splits:
            try:
                gt, gv, ft, fv = (int(v) for v in args.splits.split(","))
            except ValueError:
                raise ConfigError("--splits expects four comma-separated integers") from None
            splits = cocoio.SplitConfig(gt, gv, ft, fv)
        summary = cmd_generate(args.config, master_seed=args.master_seed, samples_dir=args.samples_dir,
                               output_dir=args.output_dir, templates=args.templates,
                               workers=args.workers, splits=splits)
        print(f"{'split':<8}{'genuine':>9}{'forged':>9}{'total':>9}")
        for split, row in summary["splits"].items():
            print(f"{split:<8}{row['genuine']:>9}{row['forged']:>9}{row['total']:>9}")
    elif args.command == "stats":
        tables = cmd_stats(args.dataset)
        print(json.dumps(tables, indent=1) if args.json else cocoio.format_stats(tables))
    elif args.command == "dilate":
        res = cmd_dilate(args.in_dir, args.out_dir, args.radius, args.iterations)
        print(f"dilated {res.count} images into {args.out_dir}")
        for name, reason in res.skipped:
            print(f"skipped {name}: {reason}", file=sys.stderr)
    elif args.command == "evaluate":
        cfg = EvalConfig(size_metric_iou=args.size_iou, max_dets=args.max_dets, per_class=args.per_class)
        result = cmd_evaluate(args.predictions, args.ground_truth, cfg)
        layouts = ["overall", "class_wise"] if args.layout == "both" else [args.layout]
        print("\n\n".join(report(result, layout, args.label) for layout in layouts))
        if args.json_out:
            args.json_out.write_text(json.dumps(result.to_dict(), indent=1) + "\n", encoding="utf-8")
    elif args.command == "validate":
        return _validate(args)
    elif args.command == "demo":
        from .synthetic import make_collection

        manifest = make_collection(args.out_dir, persons=args.persons, seed=args.seed)
        print(f"wrote {manifest}")
    return 0


def _validate(args) -> int:
    if args.samples:
        reports = sheets.validate_collection(sheets.load_samples(args.samples))
        flagged = 0
        for rep in reports.values():
            flagged += bool(rep.flags)
            g, f = rep.genuine, rep.forged
            flags = "; ".join(rep.flags) or "ok"
            print(f"{rep.person_id:<10} genuine {g['ballpoint']:>2}bp/{g['pencil']:>2}pc  "
                  f"forged {f['ballpoint']:>2}bp/{f['pencil']:>2}pc  {flags}")
        return 2 if args.strict and flagged else 0
    bad = 0
    for split, path in _dataset_files(Path(args.dataset)).items():
        ds = cocoio.read_dataset(path, strict=False)
        violations = cocoio.validate_dataset(ds)
        print(f"{path}: {len(ds.images)} images, {len(ds.annotations)} annotations, "
              f"{len(violations)} violation(s)")
        for v in violations:
            print(f"  {v}")
        bad += bool(violations)
    # findings are not errors; only --strict turns them into a failing status
    return 2 if args.strict and bad else 0


if __name__ == "__main__":
    sys.exit(main())
