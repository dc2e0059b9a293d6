"""Command-line entry point.

Subcommands: build-reference, segment, train, evaluate, sweep. Every
run writes config.echo.json (the effective parameters) into --out, so
any output is reproducible from that file plus the inputs. The
FLOODLENS_THREADS environment variable bounds the evaluation worker
pool; output ordering is canonical (sorted by path) regardless.
"""

import argparse
import json
import os
import sys
from dataclasses import asdict
from pathlib import Path

import numpy as np
from PIL import Image

from .classifier import TrainConfig, load_model, mlp_init, save_model, train
from .errors import FloodlensError
from .evaluation import (
    dataset_features,
    manifest_from_json,
    report_to_csv,
    report_to_json,
    run_cross_eval,
    run_mlp_eval,
    run_segmentation_eval,
    sweep_k,
)
from .imaging import load_image
from .segmentation import (
    SegmentationConfig,
    ReferenceSignature,
    build_reference_signature,
    segment_and_classify,
)
from .texture import LbpHistogram

REFERENCE_MAGIC = "floodlens-reference"
REFERENCE_VERSION = 1


def _workers():
    value = os.environ.get("FLOODLENS_THREADS")
    return int(value) if value else None


def _echo_config(out_dir, command, params):
    out_dir.mkdir(parents=True, exist_ok=True)
    doc = {"command": command, "parameters": params}
    (out_dir / "config.echo.json").write_text(
        json.dumps(doc, indent=2, sort_keys=True) + "\n")


def save_reference(ref, path):
    doc = {
        "format": REFERENCE_MAGIC,
        "version": REFERENCE_VERSION,
        "source_note": ref.source_note,
        "histograms": [h.bins.tolist() for h in ref.histograms],
    }
    Path(path).write_text(json.dumps(doc, sort_keys=True) + "\n")


def load_reference(path):
    doc = json.loads(Path(path).read_text())
    if doc.get("format") != REFERENCE_MAGIC:
        raise FloodlensError(f"{path}: not a reference signature file")
    histograms = tuple(LbpHistogram(bins=np.asarray(h, dtype=np.float64))
                       for h in doc["histograms"])
    return ReferenceSignature(histograms=histograms,
                              source_note=doc.get("source_note", ""))


def cmd_build_reference(args):
    out = Path(args.out)
    _echo_config(out, "build-reference",
                 {"images": args.images, "masks": args.masks})
    pairs = []
    for img_path, mask_path in zip(args.images, args.masks):
        rgb = load_image(img_path)
        mask = np.asarray(Image.open(mask_path)) > 0
        # masks are stored full-size; crop to the radius-1 LBP interior
        if mask.shape == rgb.shape[:2]:
            mask = mask[1:-1, 1:-1]
        pairs.append((rgb, mask))
    ref = build_reference_signature(pairs, source_note=",".join(args.images))
    save_reference(ref, out / "reference.json")
    return 0


def _segmentation_config(args):
    return SegmentationConfig(
        k=args.k,
        seed=args.seed,
        use_texture=args.texture == "on",
        colorspace=args.colorspace,
        decision_threshold=args.threshold,
        reject_threshold=args.reject_threshold,
    )


def cmd_segment(args):
    out = Path(args.out)
    cfg = _segmentation_config(args)
    _echo_config(out, "segment", {"input": args.input, "reference": args.reference,
                                  **asdict(cfg)})
    ref = load_reference(args.reference)
    rgb = load_image(args.input)
    res = segment_and_classify(rgb, ref, cfg)
    mask = np.zeros(res.labels.shape, dtype=np.uint8)
    if res.water_segment is not None:
        mask[res.labels == res.water_segment] = 255
    Image.fromarray(mask).save(out / "mask.png")
    record = {
        "path": args.input,
        "k": cfg.k,
        "colorspace": cfg.colorspace,
        "feature_dim": 4 if cfg.use_texture else 3,
        "water_segment": res.water_segment,
        "water_fraction": res.water_fraction,
        "distances": res.segment_distances,
        "decision": res.decision,
    }
    (out / "record.json").write_text(json.dumps(record, indent=2, sort_keys=True) + "\n")
    return 0


def cmd_train(args):
    out = Path(args.out)
    cfg = TrainConfig(learning_rate=args.lr, epochs=args.epochs,
                      batch_size=args.batch, dropout_rate=args.dropout,
                      seed=args.seed)
    _echo_config(out, "train", {"manifest": args.manifest, **asdict(cfg)})
    manifest = manifest_from_json(args.manifest)
    data = [(feat, 1 if truth == "flooded" else 0)
            for _, feat, truth in dataset_features(manifest, _workers())]
    model = mlp_init(seed=cfg.seed, dropout_rate=cfg.dropout_rate)
    model, losses = train(model, data, cfg)
    save_model(model, out / "model.flmlp")
    with open(out / "loss.csv", "w") as fh:
        fh.write("epoch,loss\n")
        for i, loss in enumerate(losses, start=1):
            fh.write(f"{i},{loss!r}\n")
    return 0


def cmd_evaluate(args):
    out = Path(args.out)
    params = {"mode": args.mode, "manifest": args.manifest,
              "reference": args.reference, "model": args.model}
    manifest = manifest_from_json(args.manifest)
    if args.mode == "segmentation":
        if not args.reference:
            raise FloodlensError("--reference is required in segmentation mode")
        cfg = _segmentation_config(args)
        params.update(asdict(cfg))
        _echo_config(out, "evaluate", params)
        ref = load_reference(args.reference)
        report = run_segmentation_eval(manifest, ref, cfg, workers=_workers())
    else:
        if not args.model:
            raise FloodlensError("--model is required in mlp mode")
        _echo_config(out, "evaluate", params)
        model = load_model(args.model)
        report = run_mlp_eval(manifest, model, workers=_workers())
    report_to_json(report, out / "report.json")
    report_to_csv(report, out / "report.csv")
    return 0


def cmd_sweep(args):
    out = Path(args.out)
    k_values = [int(v) for v in args.k.split(",") if v]
    colorspaces = [c for c in args.colorspaces.split(",") if c]
    if not k_values:
        raise FloodlensError("--k must list at least one value")
    _echo_config(out, "sweep", {"manifest": args.manifest, "reference": args.reference,
                                "k": k_values, "colorspaces": colorspaces,
                                "seed": args.seed})
    manifest = manifest_from_json(args.manifest)
    ref = load_reference(args.reference)
    base = SegmentationConfig(seed=args.seed)
    rows = sweep_k(manifest, ref, k_values, colorspaces, base_config=base,
                   workers=_workers())
    with open(out / "sweep.csv", "w") as fh:
        fh.write("colorspace,k,accuracy\n")
        for row in rows:
            fh.write(f"{row['colorspace']},{row['k']},{row['accuracy']!r}\n")
    return 0


def _add_segmentation_flags(parser):
    parser.add_argument("--k", type=int, default=3)
    parser.add_argument("--colorspace", choices=["lab", "rgb"], default="lab")
    parser.add_argument("--texture", choices=["on", "off"], default="on")
    parser.add_argument("--threshold", type=float, default=0.25)
    parser.add_argument("--reject-threshold", type=float, default=0.9)


def build_parser():
    parser = argparse.ArgumentParser(prog="floodlens",
                                     description="Flood detection in aerial images")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("build-reference", help="build a water reference signature")
    p.add_argument("--images", nargs="+", required=True)
    p.add_argument("--masks", nargs="+", required=True)
    p.add_argument("--out", required=True)
    p.set_defaults(func=cmd_build_reference)

    p = sub.add_parser("segment", help="segment one image and decide flooded/non-flooded")
    p.add_argument("--input", required=True)
    p.add_argument("--reference", required=True)
    _add_segmentation_flags(p)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--out", required=True)
    p.set_defaults(func=cmd_segment)

    p = sub.add_parser("train", help="train the LBP-feature classifier")
    p.add_argument("--manifest", required=True)
    p.add_argument("--epochs", type=int, default=200)
    p.add_argument("--lr", type=float, default=0.05)
    p.add_argument("--batch", type=int, default=16)
    p.add_argument("--dropout", type=float, default=0.2)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--out", required=True)
    p.set_defaults(func=cmd_train)

    p = sub.add_parser("evaluate", help="evaluate a model over a manifest")
    p.add_argument("--mode", choices=["segmentation", "mlp"], required=True)
    p.add_argument("--manifest", required=True)
    p.add_argument("--reference")
    p.add_argument("--model")
    _add_segmentation_flags(p)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--out", required=True)
    p.set_defaults(func=cmd_evaluate)

    p = sub.add_parser("sweep", help="k/colorspace accuracy grid")
    p.add_argument("--manifest", required=True)
    p.add_argument("--reference", required=True)
    p.add_argument("--k", default="3,4")
    p.add_argument("--colorspaces", default="lab,rgb")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--out", required=True)
    p.set_defaults(func=cmd_sweep)

    return parser


def main(argv=None):
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except (FloodlensError, FileNotFoundError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
