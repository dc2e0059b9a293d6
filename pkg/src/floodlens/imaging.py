"""Image decoding and color space conversions.

Conventions: an RGB image is a (H, W, 3) uint8 array, a gray image is a
(H, W) uint8 array, and a Lab image is a (H, W, 3) float64 array with
L in [0, 100] and a, b roughly in [-128, 127]. sRGB primaries with the
D65 white point are assumed throughout.
"""

import numpy as np
from PIL import Image, UnidentifiedImageError

from .errors import DecodeError, ImageTooSmall

MIN_DIM = 3  # LBP needs at least a 1-pixel border around the center

# linear RGB -> XYZ, sRGB/D65 (IEC 61966-2-1)
_RGB_TO_XYZ = np.array([
    [0.4124564, 0.3575761, 0.1804375],
    [0.2126729, 0.7151522, 0.0721750],
    [0.0193339, 0.1191920, 0.9503041],
])
_D65 = np.array([0.95047, 1.0, 1.08883])


def load_image(path):
    """Decode a PNG or JPEG into an (H, W, 3) uint8 RGB array.

    Alpha channels are dropped; 16-bit channels are rescaled to 8-bit.
    """
    try:
        with Image.open(path) as im:
            im.load()
            if im.mode in ("I", "I;16", "I;16B", "I;16L"):
                arr = np.asarray(im, dtype=np.float64)
                im = Image.fromarray((arr / 257.0).round().clip(0, 255).astype(np.uint8))
            rgb = np.asarray(im.convert("RGB"))
    except FileNotFoundError:
        raise
    except (UnidentifiedImageError, OSError, SyntaxError) as exc:
        raise DecodeError(f"cannot decode {path}: {exc}") from exc
    h, w = rgb.shape[:2]
    if h < MIN_DIM or w < MIN_DIM:
        raise ImageTooSmall(f"{path}: {w}x{h} is below the {MIN_DIM}x{MIN_DIM} minimum")
    return np.ascontiguousarray(rgb)


def rgb_to_gray(rgb):
    """BT.601 luma: round(0.299 R + 0.587 G + 0.114 B), uint8."""
    rgb = np.asarray(rgb, dtype=np.float64)
    gray = 0.299 * rgb[..., 0] + 0.587 * rgb[..., 1] + 0.114 * rgb[..., 2]
    return np.clip(np.round(gray), 0, 255).astype(np.uint8)


def rgb_to_lab(rgb):
    """Per-pixel sRGB -> CIELAB (D65), float64 output of the same shape."""
    srgb = np.asarray(rgb, dtype=np.float64) / 255.0
    linear = np.where(
        srgb > 0.04045,
        ((srgb + 0.055) / 1.055) ** 2.4,
        srgb / 12.92,
    )
    xyz = linear @ _RGB_TO_XYZ.T
    t = xyz / _D65
    delta = 6.0 / 29.0
    f = np.where(t > delta ** 3, np.cbrt(t), t / (3 * delta ** 2) + 4.0 / 29.0)
    lab = np.empty_like(xyz)
    lab[..., 0] = 116.0 * f[..., 1] - 16.0
    lab[..., 1] = 500.0 * (f[..., 0] - f[..., 1])
    lab[..., 2] = 200.0 * (f[..., 1] - f[..., 2])
    return lab
