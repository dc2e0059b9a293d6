"""Pure-numpy fallback for the hot kernels.

Results must be bit-identical to the compiled backend: same neighbor
order for LBP codes, same per-dimension summation order and first-minimum
tie-break for the k-means assignment step.
"""

import numpy as np

# (dy, dx) offsets starting at the top-left neighbor, clockwise.
# Bit i of an LBP code corresponds to NEIGHBOR_OFFSETS[i].
NEIGHBOR_OFFSETS = (
    (-1, -1), (-1, 0), (-1, 1), (0, 1),
    (1, 1), (1, 0), (1, -1), (0, -1),
)


def lbp_codes(gray, radius):
    """LBP codes for every interior pixel of an 8-bit image.

    Output shape is (H - 2*radius, W - 2*radius). A bit is set when the
    neighbor at that offset is >= the center value.
    """
    h, w = gray.shape
    r = radius
    center = gray[r:h - r, r:w - r]
    codes = np.zeros(center.shape, dtype=np.uint8)
    for i, (dy, dx) in enumerate(NEIGHBOR_OFFSETS):
        oy, ox = dy * r, dx * r
        neighbor = gray[r + oy:h - r + oy, r + ox:w - r + ox]
        codes |= (neighbor >= center).astype(np.uint8) << i
    return codes


def assign_labels(points, centroids):
    """Nearest-centroid assignment.

    Returns (labels int32, squared distance to the assigned centroid).
    Ties go to the lowest centroid index.
    """
    n = points.shape[0]
    k = centroids.shape[0]
    dists = np.empty((k, n), dtype=np.float64)
    for j in range(k):
        diff = points - centroids[j]
        dists[j] = (diff * diff).sum(axis=1)
    labels = np.argmin(dists, axis=0).astype(np.int32)
    return labels, dists[labels, np.arange(n)]
