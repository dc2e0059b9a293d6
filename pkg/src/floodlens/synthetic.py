"""Seeded synthetic aerial-image generator.

Used as a ground-truth oracle by the test and acceptance suites. Water
is rendered as a diagonal sawtooth "ripple" whose LBP codes concentrate
on a few values disjoint from the codes of the two background families
(smooth axis-aligned gradients vs solid blocks). Hard non-flooded
scenes pair a small pond with a large still region of the same color,
which defeats color-only segmentation but not color+texture.

Every image is a pure function of the rng state, so corpora are fully
reproducible from a seed.
"""

from dataclasses import dataclass

import numpy as np

from .segmentation import build_reference_signature

SIZE = 96
RIPPLE_PERIOD = 32  # diagonal wavelength in pixels
RIPPLE_AMP = 16.0  # peak deviation from the base color, per channel
BG_RAMP = 40.0  # brightness ramp across smooth backgrounds
WATER_BASE = np.array([70.0, 95.0, 125.0])  # bluish gray

# muted land-cover colors; luma kept below ~140 so the brightness ramp
# added by _smooth_background never clips
_PALETTE = np.array([
    [120.0, 110.0, 80.0],   # soil
    [80.0, 120.0, 60.0],    # vegetation
    [130.0, 130.0, 130.0],  # pavement
    [150.0, 120.0, 85.0],   # sand
    [60.0, 80.0, 50.0],     # dark vegetation
])


@dataclass(frozen=True)
class SyntheticImage:
    rgb: np.ndarray  # (H, W, 3) uint8
    water_mask: np.ndarray  # (H, W) bool, true where rippled water
    flooded: bool  # ground truth: rippled water fraction > 0.25


def _ripple(rng, h, w):
    """Rippled water: brightness sawtooth along the image diagonal.

    The per-pixel step (2*AMP/PERIOD = 2 gray levels) is large enough
    that rounding never creates ties, so the LBP codes of the patch
    concentrate on the diagonal-ramp code plus a ~1/PERIOD share of
    wavefront-minimum codes.
    """
    offset = rng.integers(RIPPLE_PERIOD)
    yy, xx = np.mgrid[0:h, 0:w]
    phase = (xx + yy + offset) % RIPPLE_PERIOD
    mod = (phase / (RIPPLE_PERIOD - 1) - 0.5) * 2.0 * RIPPLE_AMP
    return np.clip(WATER_BASE + mod[..., None], 0, 255)


def _smooth_background(rng, h, w):
    """Axis-aligned gradient between two palette colors plus a
    brightness ramp. The endpoint pair is constrained to a luma gap of
    at least 15 so quantization plateaus stay too narrow to emit the
    all-ones LBP code."""
    luma = _PALETTE @ np.array([0.299, 0.587, 0.114])
    while True:
        i, j = rng.choice(len(_PALETTE), size=2, replace=False)
        if abs(luma[i] - luma[j]) >= 15:
            break
    c0, c1 = _PALETTE[i], _PALETTE[j]
    yy, xx = np.mgrid[0:h, 0:w].astype(np.float64)
    t = xx / (w - 1) if rng.integers(2) == 0 else yy / (h - 1)
    if rng.integers(2) == 0:
        t = 1.0 - t
    return c0 + (c1 - c0) * t[..., None] + BG_RAMP * t[..., None]


def _blocky_background(rng, h, w):
    """Solid base color overlaid with random solid rectangles."""
    base = _PALETTE[rng.integers(len(_PALETTE))]
    img = np.broadcast_to(base, (h, w, 3)).copy()
    for _ in range(rng.integers(4, 8)):
        color = _PALETTE[rng.integers(len(_PALETTE))]
        bh = rng.integers(h // 6, h // 2)
        bw = rng.integers(w // 6, w // 2)
        y0 = rng.integers(0, h - bh)
        x0 = rng.integers(0, w - bw)
        img[y0:y0 + bh, x0:x0 + bw] = color
    return img


def _place_region(rng, img, mask, patch, frac):
    """Paste a patch covering roughly `frac` of the image area."""
    h, w = img.shape[:2]
    area = frac * h * w
    rh = int(np.clip(np.sqrt(area * rng.uniform(0.8, 1.25)), 8, h))
    rw = int(np.clip(area / rh, 8, w))
    y0 = rng.integers(0, h - rh + 1)
    x0 = rng.integers(0, w - rw + 1)
    img[y0:y0 + rh, x0:x0 + rw] = patch[:rh, :rw]
    if mask is not None:
        mask[y0:y0 + rh, x0:x0 + rw] = True


def make_image(rng, flooded, family="smooth", hard=False, size=SIZE):
    """One synthetic scene.

    flooded: a rippled water region well above the 25% rule. A hard
    non-flooded scene carries a sub-threshold pond next to a large still
    region of the same water color.
    """
    h = w = size
    if family == "smooth":
        img = _smooth_background(rng, h, w)
    elif family == "blocky":
        img = _blocky_background(rng, h, w)
    else:
        raise ValueError(f"unknown family {family!r}")
    mask = np.zeros((h, w), dtype=bool)
    if flooded:
        _place_region(rng, img, mask, _ripple(rng, h, w), rng.uniform(0.45, 0.6))
    elif hard:
        still = np.broadcast_to(WATER_BASE, (h, w, 3))
        _place_region(rng, img, None, still, rng.uniform(0.4, 0.5))
        _place_region(rng, img, mask, _ripple(rng, h, w), rng.uniform(0.08, 0.12))
    rgb = np.clip(np.round(img), 0, 255).astype(np.uint8)
    return SyntheticImage(rgb=rgb, water_mask=mask, flooded=flooded)


def make_corpus(seed, n_flooded, n_clear, family="smooth", hard_fraction=0.5, size=SIZE):
    """Seeded list of SyntheticImages, flooded first then non-flooded."""
    rng = np.random.default_rng(seed)
    images = [make_image(rng, True, family, size=size) for _ in range(n_flooded)]
    n_hard = int(round(n_clear * hard_fraction))
    for i in range(n_clear):
        images.append(make_image(rng, False, family, hard=i < n_hard, size=size))
    return images


def make_reference(seed, n_patches=3, size=SIZE):
    """Water reference signature from standalone ripple patches, kept
    independent of any evaluation corpus."""
    rng = np.random.default_rng(seed)
    pairs = []
    for _ in range(n_patches):
        patch = np.clip(np.round(_ripple(rng, size, size)), 0, 255).astype(np.uint8)
        mask = np.ones((size - 2, size - 2), dtype=bool)  # radius-1 interior
        pairs.append((patch, mask))
    return build_reference_signature(pairs, source_note=f"synthetic ripple seed={seed}")
