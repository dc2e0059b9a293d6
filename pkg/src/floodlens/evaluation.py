"""Dataset ingestion, ground-truth labeling, metrics, and the
experiment grids (k/colorspace sweep, texture ablation, cross-dataset
train/test).

Two dataset layouts are supported, mirroring the folder-per-class and
image-plus-mask conventions of public post-disaster corpora: class
subfolders named "flooded"/"normal" (configurable), or an images/ tree
paired with a masks/ tree by filename stem. Mask-derived truth follows
the strict 25% water-pixel rule.
"""

import csv
import json
from dataclasses import asdict, dataclass, replace
from pathlib import Path

import numpy as np
from PIL import Image

from .classifier import TrainConfig, mlp_init, predict, train
from .errors import (
    EmptyDataset,
    EmptyEvaluation,
    UnknownClassFolder,
    UnpairedImage,
)
from .imaging import load_image, rgb_to_gray
from .segmentation import SegmentationConfig, segment_and_classify
from .texture import lbp_feature_512

IMAGE_SUFFIXES = {".png", ".jpg", ".jpeg"}
DEFAULT_CLASS_FOLDERS = {"flooded": "flooded", "normal": "non-flooded"}


@dataclass(frozen=True)
class ManifestEntry:
    image_path: str
    label: str | None = None  # "flooded" | "non-flooded" when direct
    mask_path: str | None = None  # when truth comes from a mask


@dataclass(frozen=True)
class DatasetManifest:
    name: str
    layout: str  # "folder-per-class" | "image-plus-mask"
    entries: tuple
    water_class_values: tuple = (1,)


@dataclass
class ConfusionMatrix:
    tp: int = 0
    fp: int = 0
    fn: int = 0
    tn: int = 0

    def add(self, predicted_flooded, truth_flooded):
        if predicted_flooded and truth_flooded:
            self.tp += 1
        elif predicted_flooded:
            self.fp += 1
        elif truth_flooded:
            self.fn += 1
        else:
            self.tn += 1

    @property
    def total(self):
        return self.tp + self.fp + self.fn + self.tn


@dataclass(frozen=True)
class Metrics:
    accuracy: float
    precision: float
    recall: float
    f1: float
    degenerate: bool = False  # some ratio was 0/0 and reported as 0


@dataclass
class EvalReport:
    model_id: str
    dataset: str
    metrics: Metrics
    per_image: list  # dicts: path, predicted, truth, score_or_fraction, flags
    train_dataset: str | None = None


def load_manifest(root, layout, water_class_values=(1,), name=None,
                  class_folders=DEFAULT_CLASS_FOLDERS):
    """Scan a dataset directory into a manifest."""
    root = Path(root)
    name = name or root.name
    entries = []
    if layout == "folder-per-class":
        for sub in sorted(p for p in root.iterdir() if p.is_dir()):
            if sub.name not in class_folders:
                raise UnknownClassFolder(f"{sub}: not one of {sorted(class_folders)}")
            label = class_folders[sub.name]
            for img in sorted(sub.iterdir()):
                if img.suffix.lower() in IMAGE_SUFFIXES:
                    entries.append(ManifestEntry(image_path=str(img), label=label))
    elif layout == "image-plus-mask":
        images_dir = root / "images"
        masks_dir = root / "masks"
        masks = {p.stem: p for p in masks_dir.iterdir()} if masks_dir.is_dir() else {}
        for img in sorted(images_dir.iterdir() if images_dir.is_dir() else []):
            if img.suffix.lower() not in IMAGE_SUFFIXES:
                continue
            if img.stem not in masks:
                raise UnpairedImage(f"no mask for stem {img.stem!r}")
            entries.append(ManifestEntry(image_path=str(img), mask_path=str(masks[img.stem])))
    else:
        raise ValueError(f"unknown layout {layout!r}")
    if not entries:
        raise EmptyDataset(f"no images found under {root}")
    return DatasetManifest(name=name, layout=layout, entries=tuple(entries),
                           water_class_values=tuple(water_class_values))


def manifest_to_json(manifest, path):
    doc = {
        "name": manifest.name,
        "layout": manifest.layout,
        "water_class_values": list(manifest.water_class_values),
        "entries": [
            {"image": e.image_path, **({"label": e.label} if e.label else {"mask": e.mask_path})}
            for e in manifest.entries
        ],
    }
    Path(path).write_text(json.dumps(doc, indent=2, sort_keys=True) + "\n")


def manifest_from_json(path):
    doc = json.loads(Path(path).read_text())
    entries = tuple(
        ManifestEntry(image_path=e["image"], label=e.get("label"), mask_path=e.get("mask"))
        for e in doc["entries"]
    )
    if not entries:
        raise EmptyDataset(f"{path}: manifest has no entries")
    return DatasetManifest(
        name=doc["name"],
        layout=doc["layout"],
        entries=entries,
        water_class_values=tuple(doc.get("water_class_values", [1])),
    )


def derive_label(mask, water_class_values, threshold=0.25):
    """Flooded iff the water-pixel fraction strictly exceeds threshold."""
    mask = np.asarray(mask)
    water = np.isin(mask, list(water_class_values))
    return "flooded" if water.mean() > threshold else "non-flooded"


def entry_truth(entry, water_class_values, threshold=0.25):
    if entry.label is not None:
        return entry.label
    mask = np.asarray(Image.open(entry.mask_path))
    return derive_label(mask, water_class_values, threshold)


def compute_metrics(cm):
    """Precision/recall/F1/accuracy with flooded as the positive class.
    Any 0/0 ratio is reported as 0 and flagged degenerate."""
    if cm.total == 0:
        raise EmptyEvaluation("no evaluated images")
    degenerate = False

    def ratio(num, den):
        nonlocal degenerate
        if den == 0:
            degenerate = True
            return 0.0
        return num / den

    precision = ratio(cm.tp, cm.tp + cm.fp)
    recall = ratio(cm.tp, cm.tp + cm.fn)
    f1 = ratio(2 * precision * recall, precision + recall)
    accuracy = (cm.tp + cm.tn) / cm.total
    return Metrics(accuracy=accuracy, precision=precision, recall=recall,
                   f1=f1, degenerate=degenerate)


def _collect(records):
    cm = ConfusionMatrix()
    for rec in records:
        cm.add(rec["predicted"] == "flooded", rec["truth"] == "flooded")
    return cm


def run_segmentation_eval(manifest, ref, config=SegmentationConfig(), workers=None):
    """segment_and_classify over every manifest entry. Per-image
    failures are recorded and scored as non-flooded predictions."""

    def evaluate_one(entry):
        truth = entry_truth(entry, manifest.water_class_values)
        rec = {"path": entry.image_path, "truth": truth}
        try:
            rgb = load_image(entry.image_path)
            res = segment_and_classify(rgb, ref, config)
            rec["predicted"] = res.decision
            rec["score_or_fraction"] = res.water_fraction
        except Exception as exc:  # failures must not abort a bulk run
            rec["predicted"] = "non-flooded"
            rec["score_or_fraction"] = 0.0
            rec["error"] = f"{type(exc).__name__}: {exc}"
        return rec

    records = _map_entries(evaluate_one, manifest.entries, workers)
    return EvalReport(
        model_id=f"kmeans(k={config.k},{config.colorspace},texture={'on' if config.use_texture else 'off'})",
        dataset=manifest.name,
        metrics=compute_metrics(_collect(records)),
        per_image=records,
    )


def _map_entries(fn, entries, workers):
    if workers and workers > 1:
        from concurrent.futures import ThreadPoolExecutor

        with ThreadPoolExecutor(max_workers=workers) as pool:
            records = list(pool.map(fn, entries))
    else:
        records = [fn(e) for e in entries]
    return sorted(records, key=lambda r: r["path"])


def sweep_k(manifest, ref, k_values, colorspaces=("lab", "rgb"),
            base_config=SegmentationConfig(), workers=None):
    """One evaluation per (colorspace, k) cell; rows of
    (colorspace, k, accuracy)."""
    if not k_values:
        raise ValueError("k_values must be non-empty")
    rows = []
    for colorspace in colorspaces:
        for k in k_values:
            cfg = replace(base_config, k=k, colorspace=colorspace)
            report = run_segmentation_eval(manifest, ref, cfg, workers=workers)
            rows.append({"colorspace": colorspace, "k": k,
                         "accuracy": report.metrics.accuracy})
    return rows


def dataset_features(manifest, workers=None):
    """(path, 512-dim LBP feature, truth label) per manifest entry."""

    def extract(entry):
        truth = entry_truth(entry, manifest.water_class_values)
        feat = lbp_feature_512(rgb_to_gray(load_image(entry.image_path)))
        return entry.image_path, feat, truth

    return _map_entries_raw(extract, manifest.entries, workers)


def _map_entries_raw(fn, entries, workers):
    if workers and workers > 1:
        from concurrent.futures import ThreadPoolExecutor

        with ThreadPoolExecutor(max_workers=workers) as pool:
            out = list(pool.map(fn, entries))
    else:
        out = [fn(e) for e in entries]
    return sorted(out, key=lambda t: t[0])


def run_mlp_eval(manifest, model, workers=None):
    """Score every manifest entry with a trained classifier."""

    def evaluate_one(entry):
        truth = entry_truth(entry, manifest.water_class_values)
        rec = {"path": entry.image_path, "truth": truth}
        try:
            feat = lbp_feature_512(rgb_to_gray(load_image(entry.image_path)))
            decision = predict(model, feat)
            rec["predicted"] = decision.label
            rec["score_or_fraction"] = decision.score
        except Exception as exc:
            rec["predicted"] = "non-flooded"
            rec["score_or_fraction"] = 0.0
            rec["error"] = f"{type(exc).__name__}: {exc}"
        return rec

    records = _map_entries(evaluate_one, manifest.entries, workers)
    return EvalReport(
        model_id="mlp(512-256-128-64-32-16-8-1)",
        dataset=manifest.name,
        metrics=compute_metrics(_collect(records)),
        per_image=records,
    )


def run_cross_eval(train_manifest, test_manifest, cfg=TrainConfig(), workers=None):
    """Train the classifier on one dataset's LBP features and evaluate
    on another's (the cross-geography protocol)."""
    train_data = [
        (feat, 1 if truth == "flooded" else 0)
        for _, feat, truth in dataset_features(train_manifest, workers)
    ]
    model = mlp_init(seed=cfg.seed, dropout_rate=cfg.dropout_rate)
    model, _ = train(model, train_data, cfg)
    report = run_mlp_eval(test_manifest, model, workers=workers)
    report.train_dataset = train_manifest.name
    return report


def report_to_json(report, path):
    doc = {
        "model_id": report.model_id,
        "dataset": report.dataset,
        "train_dataset": report.train_dataset,
        "metrics": asdict(report.metrics),
        "per_image": report.per_image,
    }
    Path(path).write_text(json.dumps(doc, indent=2, sort_keys=True) + "\n")


def report_to_csv(report, path):
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(["path", "truth", "predicted", "score_or_fraction"])
        for rec in report.per_image:
            writer.writerow([rec["path"], rec["truth"], rec["predicted"],
                             repr(rec["score_or_fraction"])])
