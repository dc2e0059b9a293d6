"""Local Binary Pattern maps, histograms, the 512-dim feature, and the
chi-square histogram distance.

LBP convention: 8 neighbors at the given radius, starting at the
top-left and proceeding clockwise; bit i is set when neighbor_i >= center
(ties count as 1); bit 0 is the top-left neighbor. Codes are computed on
interior pixels only, so the map is 2*radius smaller per axis.
"""

from dataclasses import dataclass

import numpy as np

from . import kernels
from .errors import DimensionMismatch, ImageTooSmall, NotNormalized

N_BINS = 256
CHI2_EPS = 1e-10


@dataclass(frozen=True)
class LbpHistogram:
    bins: np.ndarray  # 256 non-negative reals
    empty: bool = False  # no pixels contributed; bins are all zero

    @property
    def normalized(self):
        return self.empty or abs(float(self.bins.sum()) - 1.0) <= 1e-9


def lbp_map(gray, radius=1):
    """Per-pixel LBP codes for the interior of an 8-bit gray image."""
    gray = np.ascontiguousarray(gray, dtype=np.uint8)
    h, w = gray.shape
    if h <= 2 * radius or w <= 2 * radius:
        raise ImageTooSmall(f"{w}x{h} image cannot host radius-{radius} LBP")
    return kernels.lbp_codes(gray, radius)


def lbp_histogram(codes, mask=None):
    """Normalized 256-bin histogram of LBP codes, optionally masked."""
    if mask is not None:
        mask = np.asarray(mask, dtype=bool)
        if mask.shape != codes.shape:
            raise DimensionMismatch(f"mask {mask.shape} vs map {codes.shape}")
        codes = codes[mask]
    counts = np.bincount(codes.ravel(), minlength=N_BINS).astype(np.float64)
    total = counts.sum()
    if total == 0:
        return LbpHistogram(bins=counts, empty=True)
    return LbpHistogram(bins=counts / total)


def lbp_feature_512(gray):
    """Radius-1 and radius-2 LBP histograms concatenated (length 512)."""
    h1 = lbp_histogram(lbp_map(gray, radius=1))
    h2 = lbp_histogram(lbp_map(gray, radius=2))
    return np.concatenate([h1.bins, h2.bins])


def histogram_distance(a, b):
    """Chi-square distance: 0.5 * sum((a-b)^2 / (a+b+eps))."""
    if a.bins.shape != b.bins.shape:
        raise DimensionMismatch(f"{a.bins.shape} vs {b.bins.shape}")
    if not a.normalized or not b.normalized:
        raise NotNormalized("histogram_distance expects normalized histograms")
    diff = a.bins - b.bins
    return float(0.5 * np.sum(diff * diff / (a.bins + b.bins + CHI2_EPS)))
