import numpy as np
import pytest

from floodlens.errors import DimensionMismatch, ImageTooSmall, NotNormalized
from floodlens.texture import (
    LbpHistogram,
    histogram_distance,
    lbp_feature_512,
    lbp_histogram,
    lbp_map,
)
from oracles import lbp_brute


def test_constant_image_all_codes_255():
    img = np.full((5, 6), 7, np.uint8)
    assert np.all(lbp_map(img, radius=1) == 255)  # ties count as 1


def test_center_above_all_neighbors_is_zero():
    img = np.zeros((3, 3), np.uint8)
    img[1, 1] = 5
    assert lbp_map(img, radius=1)[0, 0] == 0


def test_alternating_neighbors_give_0b10101010():
    img = np.zeros((3, 3), np.uint8)
    img[1, 1] = 5
    # clockwise from top-left: 1,6,2,7,3,8,4,9
    img[0, 0], img[0, 1], img[0, 2] = 1, 6, 2
    img[1, 2], img[2, 2], img[2, 1] = 7, 3, 8
    img[2, 0], img[1, 0] = 4, 9
    assert lbp_map(img, radius=1)[0, 0] == 0b10101010


@pytest.mark.parametrize("radius", [1, 2])
def test_lbp_matches_brute_force_oracle(radius):
    rng = np.random.default_rng(42)
    for _ in range(50):
        img = rng.integers(0, 256, size=(16, 16), dtype=np.uint8)
        assert np.array_equal(lbp_map(img, radius), lbp_brute(img, radius))


def test_lbp_rejects_small_images():
    with pytest.raises(ImageTooSmall):
        lbp_map(np.zeros((2, 5), np.uint8), radius=1)
    with pytest.raises(ImageTooSmall):
        lbp_map(np.zeros((4, 4), np.uint8), radius=2)


def test_lbp_invariant_under_monotone_remap():
    rng = np.random.default_rng(11)
    for _ in range(20):
        img = rng.integers(0, 128, size=(12, 12), dtype=np.uint8)
        # strictly increasing remap of the 0..127 range into 0..255
        table = np.sort(rng.choice(256, size=128, replace=False)).astype(np.uint8)
        assert np.array_equal(lbp_map(img, 1), lbp_map(table[img], 1))


def test_histogram_trivial_and_masked():
    codes = np.full((2, 2), 255, np.uint8)
    hist = lbp_histogram(codes)
    assert hist.bins[255] == 1.0 and hist.bins[:255].sum() == 0.0
    codes = np.array([[0, 0], [170, 170]], np.uint8)
    mask = np.array([[False, False], [True, True]])
    assert lbp_histogram(codes, mask).bins[170] == 1.0


def test_histogram_counting_oracle():
    rng = np.random.default_rng(5)
    codes = rng.integers(0, 256, size=(16, 16), dtype=np.uint8)
    hist = lbp_histogram(codes)
    for code in range(256):
        expected = sum(1 for v in codes.ravel() if v == code) / codes.size
        assert hist.bins[code] == pytest.approx(expected, abs=1e-12)


def test_histogram_empty_region_flagged():
    hist = lbp_histogram(np.zeros((3, 3), np.uint8), mask=np.zeros((3, 3), bool))
    assert hist.empty and np.all(hist.bins == 0.0)


def test_histogram_mask_shape_checked():
    with pytest.raises(DimensionMismatch):
        lbp_histogram(np.zeros((3, 3), np.uint8), mask=np.zeros((2, 3), bool))


def test_feature512_constant_image():
    feat = lbp_feature_512(np.full((10, 10), 50, np.uint8))
    assert feat.shape == (512,)
    assert feat[255] == 1.0 and feat[511] == 1.0
    assert feat.sum() == pytest.approx(2.0)


def test_feature512_halves_normalized_and_composed():
    rng = np.random.default_rng(9)
    img = rng.integers(0, 256, size=(32, 32), dtype=np.uint8)
    feat = lbp_feature_512(img)
    assert feat[:256].sum() == pytest.approx(1.0, abs=1e-9)
    assert feat[256:].sum() == pytest.approx(1.0, abs=1e-9)
    h1 = lbp_histogram(lbp_map(img, 1)).bins
    h2 = lbp_histogram(lbp_map(img, 2)).bins
    assert np.array_equal(feat, np.concatenate([h1, h2]))


def _hist(bins):
    return LbpHistogram(bins=np.asarray(bins, dtype=np.float64))


def test_distance_identity_and_hand_value():
    rng = np.random.default_rng(2)
    bins = rng.random(256)
    h = _hist(bins / bins.sum())
    assert histogram_distance(h, h) == 0.0
    assert histogram_distance(_hist([1.0, 0.0]), _hist([0.0, 1.0])) == pytest.approx(1.0)


def test_distance_symmetric_and_nonnegative():
    rng = np.random.default_rng(8)
    for _ in range(50):
        a, b = rng.random(256), rng.random(256)
        ha, hb = _hist(a / a.sum()), _hist(b / b.sum())
        assert histogram_distance(ha, hb) == histogram_distance(hb, ha) >= 0.0


def test_distance_input_validation():
    with pytest.raises(NotNormalized):
        histogram_distance(_hist([2.0, 0.0]), _hist([1.0, 0.0]))
    with pytest.raises(DimensionMismatch):
        histogram_distance(_hist([1.0]), _hist([0.5, 0.5]))
