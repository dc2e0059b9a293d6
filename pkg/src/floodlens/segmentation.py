"""Texture-based unsupervised flood segmentation.

Pipeline: LAB color + radius-1 LBP per-pixel features, k-means
clustering, then each cluster's LBP histogram is matched against a
reference water signature by chi-square distance. The image is declared
flooded when the matched cluster covers more than a threshold fraction
of the interior pixels (strict inequality).
"""

from dataclasses import dataclass, field

import numpy as np

from . import kernels
from .errors import (
    DimensionMismatch,
    EmptyMask,
    EmptyReference,
    InvalidK,
    TooFewPoints,
)
from .imaging import rgb_to_gray, rgb_to_lab
from .texture import LbpHistogram, histogram_distance, lbp_histogram, lbp_map

LBP_RADIUS = 1  # segmentation uses the single-scale map


@dataclass(frozen=True)
class ReferenceSignature:
    """LBP histograms of known flooded regions, typically from a
    different geography than the images being segmented."""
    histograms: tuple  # of LbpHistogram
    source_note: str = ""

    def __post_init__(self):
        if len(self.histograms) == 0:
            raise EmptyReference("reference needs at least one histogram")


@dataclass
class KMeansResult:
    k: int
    labels: np.ndarray  # per-point cluster index, int32
    centroids: np.ndarray  # (k, dim)
    inertia: float
    iterations: int
    inertia_trace: list = field(default_factory=list)


@dataclass
class SegmentationResult:
    labels: np.ndarray  # (h, w) cluster indices over the LBP interior
    water_segment: int | None
    segment_distances: list  # per-cluster chi-square distance to reference
    water_fraction: float
    decision: str  # "flooded" | "non-flooded"


@dataclass(frozen=True)
class SegmentationConfig:
    k: int = 3
    seed: int = 0
    use_texture: bool = True
    colorspace: str = "lab"  # "lab" | "rgb"
    decision_threshold: float = 0.25
    reject_threshold: float = 0.9
    max_iter: int = 100
    tol: float = 1e-4


def build_pixel_features(lab, codes, use_texture=True):
    """Stack normalized per-pixel features into an (n, dim) matrix.

    lab must already be cropped to the LBP interior window. Features are
    (L/100, (a+128)/255, (b+128)/255, code/255); the texture component
    is omitted when use_texture is false.
    """
    if lab.shape[:2] != codes.shape:
        raise DimensionMismatch(f"lab {lab.shape[:2]} vs lbp {codes.shape}")
    cols = [
        lab[..., 0].ravel() / 100.0,
        (lab[..., 1].ravel() + 128.0) / 255.0,
        (lab[..., 2].ravel() + 128.0) / 255.0,
    ]
    if use_texture:
        cols.append(codes.ravel().astype(np.float64) / 255.0)
    return np.column_stack(cols)


def build_pixel_features_rgb(rgb, codes, use_texture=True):
    """RGB variant for the colorspace sweep: channels scaled by 1/255."""
    if rgb.shape[:2] != codes.shape:
        raise DimensionMismatch(f"rgb {rgb.shape[:2]} vs lbp {codes.shape}")
    feats = rgb.reshape(-1, 3).astype(np.float64) / 255.0
    if use_texture:
        feats = np.column_stack([feats, codes.ravel().astype(np.float64) / 255.0])
    return feats


def _kmeans_pp_init(points, k, rng):
    """Seeded k-means++: centroids drawn proportionally to squared
    distance from the already-chosen set."""
    n = points.shape[0]
    centroids = np.empty((k, points.shape[1]), dtype=np.float64)
    centroids[0] = points[rng.integers(n)]
    d2 = ((points - centroids[0]) ** 2).sum(axis=1)
    for j in range(1, k):
        total = d2.sum()
        if total <= 0:
            idx = rng.integers(n)  # all points identical to a centroid
        else:
            idx = rng.choice(n, p=d2 / total)
        centroids[j] = points[idx]
        d2 = np.minimum(d2, ((points - centroids[j]) ** 2).sum(axis=1))
    return centroids


def _lloyd(points, k, rng, max_iter, tol):
    centroids = _kmeans_pp_init(points, k, rng)
    trace = []
    for it in range(1, max_iter + 1):
        labels, dists = kernels.assign_labels(points, centroids)
        for j in range(k):
            if not np.any(labels == j):
                far = int(np.argmax(dists))
                centroids[j] = points[far]
                labels[far] = j
                dists[far] = 0.0
        trace.append(float(dists.sum()))
        sums = np.zeros_like(centroids)
        np.add.at(sums, labels, points)
        counts = np.bincount(labels, minlength=k).astype(np.float64)
        new_centroids = sums / counts[:, None]
        shift = np.sqrt(((new_centroids - centroids) ** 2).sum(axis=1)).max()
        centroids = new_centroids
        if shift <= tol:
            break
    labels, dists = kernels.assign_labels(points, centroids)
    return KMeansResult(
        k=k,
        labels=labels,
        centroids=centroids,
        inertia=float(dists.sum()),
        iterations=it,
        inertia_trace=trace,
    )


def kmeans(points, k, seed=0, max_iter=100, tol=1e-4, n_init=10):
    """Lloyd's algorithm with seeded k-means++ initialization, best of
    n_init restarts by final inertia.

    Each restart terminates when the largest centroid shift is <= tol or
    max_iter is reached. Empty clusters are re-seeded to the point
    farthest from its assigned centroid. Deterministic for a fixed seed
    (restarts consume one shared seeded rng; a strictly lower inertia
    wins, so the first-best restart is kept).
    """
    points = np.ascontiguousarray(points, dtype=np.float64)
    n = points.shape[0]
    if k < 1:
        raise InvalidK("k must be >= 1")
    if n < k:
        raise TooFewPoints(f"{n} points cannot form {k} clusters")
    rng = np.random.default_rng(seed)
    best = None
    for _ in range(max(1, n_init)):
        result = _lloyd(points, k, rng, max_iter, tol)
        if best is None or result.inertia < best.inertia:
            best = result
    return best


def match_water_segment(labels, codes, ref, reject_threshold=0.9):
    """Pick the cluster whose masked LBP histogram is closest to the
    reference; ties go to the lowest index. Returns (index or None,
    per-cluster distances)."""
    if labels.shape != codes.shape:
        raise DimensionMismatch(f"labels {labels.shape} vs lbp {codes.shape}")
    if len(ref.histograms) == 0:
        raise EmptyReference("empty reference signature")
    k = int(labels.max()) + 1
    distances = []
    for j in range(k):
        hist = lbp_histogram(codes, mask=labels == j)
        if hist.empty:
            distances.append(float("inf"))
            continue
        distances.append(min(histogram_distance(hist, r) for r in ref.histograms))
    best = int(np.argmin(distances))
    if distances[best] > reject_threshold:
        return None, distances
    return best, distances


def build_reference_signature(images_with_masks, source_note=""):
    """One normalized masked LBP histogram per (rgb image, water mask).

    Masks must match the radius-1 LBP interior dimensions of their image.
    """
    histograms = []
    for i, (rgb, mask) in enumerate(images_with_masks):
        codes = lbp_map(rgb_to_gray(rgb), radius=LBP_RADIUS)
        hist = lbp_histogram(codes, mask=mask)
        if hist.empty:
            raise EmptyMask(f"reference image {i} contributes no water pixels")
        histograms.append(hist)
    return ReferenceSignature(histograms=tuple(histograms), source_note=source_note)


def segment_and_classify(rgb, ref, config=SegmentationConfig()):
    """Full per-image pipeline: features, k-means, reference matching,
    flood decision."""
    gray = rgb_to_gray(rgb)
    codes = lbp_map(gray, radius=LBP_RADIUS)
    r = LBP_RADIUS
    interior = (slice(r, rgb.shape[0] - r), slice(r, rgb.shape[1] - r))
    if config.colorspace == "rgb":
        feats = build_pixel_features_rgb(rgb[interior], codes, config.use_texture)
    else:
        feats = build_pixel_features(rgb_to_lab(rgb)[interior], codes, config.use_texture)
    km = kmeans(feats, config.k, seed=config.seed,
                max_iter=config.max_iter, tol=config.tol)
    labels = km.labels.reshape(codes.shape)
    water, distances = match_water_segment(labels, codes, ref,
                                           reject_threshold=config.reject_threshold)
    if water is None:
        fraction = 0.0
    else:
        fraction = float(np.count_nonzero(labels == water)) / labels.size
    decision = "flooded" if fraction > config.decision_threshold else "non-flooded"
    return SegmentationResult(
        labels=labels,
        water_segment=water,
        segment_distances=distances,
        water_fraction=fraction,
        decision=decision,
    )
