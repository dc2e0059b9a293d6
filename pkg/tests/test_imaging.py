import io

import numpy as np
import pytest
from PIL import Image

from floodlens.errors import DecodeError, ImageTooSmall
from floodlens.imaging import load_image, rgb_to_gray, rgb_to_lab


def save_png(path, arr):
    Image.fromarray(arr).save(path)
    return str(path)


def test_load_rejects_tiny_image(tmp_path):
    path = save_png(tmp_path / "tiny.png", np.full((1, 1, 3), [255, 0, 0], np.uint8))
    with pytest.raises(ImageTooSmall):
        load_image(path)


def test_load_identity_decode(tmp_path):
    src = np.full((4, 4, 3), [10, 20, 30], np.uint8)
    path = save_png(tmp_path / "flat.png", src)
    assert np.array_equal(load_image(path), src)


def test_load_jpeg_roundtrip_within_codec_tolerance(tmp_path):
    rng = np.random.default_rng(7)
    src = rng.integers(0, 256, size=(8, 8, 3), dtype=np.uint8)
    path = tmp_path / "pattern.jpg"
    Image.fromarray(src).save(path, quality=100, subsampling=0)
    decoded = load_image(str(path))
    assert np.abs(decoded.astype(int) - src.astype(int)).max() <= 4


def test_load_drops_alpha(tmp_path):
    rgba = np.dstack([np.full((4, 4), 50, np.uint8)] * 3 + [np.full((4, 4), 7, np.uint8)])
    path = save_png(tmp_path / "alpha.png", rgba)
    out = load_image(path)
    assert out.shape == (4, 4, 3)
    assert np.all(out == 50)


def test_load_rescales_16bit(tmp_path):
    arr16 = np.full((4, 4), 65535, np.uint16)
    path = tmp_path / "deep.png"
    Image.fromarray(arr16).save(path)
    out = load_image(str(path))
    assert np.all(out == 255)


def test_load_missing_and_corrupt(tmp_path):
    with pytest.raises(FileNotFoundError):
        load_image(str(tmp_path / "nope.png"))
    bad = tmp_path / "bad.png"
    bad.write_bytes(b"not an image at all")
    with pytest.raises(DecodeError):
        load_image(str(bad))


def test_lab_reference_white_and_black():
    white = rgb_to_lab(np.full((1, 1, 3), 255, np.uint8))[0, 0]
    assert white[0] == pytest.approx(100.0, abs=0.01)
    assert white[1] == pytest.approx(0.0, abs=0.01)
    assert white[2] == pytest.approx(0.0, abs=0.01)
    black = rgb_to_lab(np.zeros((1, 1, 3), np.uint8))[0, 0]
    assert np.allclose(black, 0.0, atol=0.01)


def test_lab_mid_gray():
    # L computed beforehand from the sRGB/D65 formulas by hand: 50.06
    lab = rgb_to_lab(np.full((1, 1, 3), 119, np.uint8))[0, 0]
    assert lab[0] == pytest.approx(50.0, abs=0.5)
    assert abs(lab[1]) < 0.5
    assert abs(lab[2]) < 0.5


def test_lab_lightness_monotone_in_gray_level():
    grays = np.arange(256, dtype=np.uint8).reshape(-1, 1)
    lab = rgb_to_lab(np.repeat(grays[:, :, None], 3, axis=2))
    lightness = lab[:, 0, 0]
    assert np.all(np.diff(lightness) >= 0)
    assert np.all(np.abs(lab[:, 0, 1:]) < 0.5)  # grays are achromatic


def test_gray_trivial_and_derived():
    img = np.array([[[255, 255, 255], [0, 0, 0], [100, 150, 200]]], np.uint8)
    assert list(rgb_to_gray(img)[0]) == [255, 0, 141]  # 29.9+88.05+22.8 -> 141


def test_gray_equal_channels_identity():
    vals = np.arange(256, dtype=np.uint8)
    img = np.repeat(vals.reshape(1, -1, 1), 3, axis=2)
    assert np.array_equal(rgb_to_gray(img)[0], vals)


def test_conversions_are_pure():
    rng = np.random.default_rng(3)
    img = rng.integers(0, 256, size=(6, 5, 3), dtype=np.uint8)
    assert np.array_equal(rgb_to_gray(img), rgb_to_gray(img.copy()))
    assert np.array_equal(rgb_to_lab(img), rgb_to_lab(img.copy()))
