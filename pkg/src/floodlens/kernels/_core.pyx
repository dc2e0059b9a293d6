# cython: language_level=3, boundscheck=False, wraparound=False
"""Compiled hot kernels: LBP code extraction and k-means assignment.

Semantics must stay bit-identical to kernels._pure (neighbor order,
summation order, tie-breaking).
"""

import numpy as np

cimport numpy as cnp

cnp.import_array()

# Top-left neighbor first, clockwise; bit i uses offset i.
cdef int[8] OFF_Y = [-1, -1, -1, 0, 1, 1, 1, 0]
cdef int[8] OFF_X = [-1, 0, 1, 1, 1, 0, -1, -1]


def lbp_codes(const unsigned char[:, ::1] gray, int radius):
    cdef Py_ssize_t h = gray.shape[0]
    cdef Py_ssize_t w = gray.shape[1]
    cdef Py_ssize_t oh = h - 2 * radius
    cdef Py_ssize_t ow = w - 2 * radius
    out = np.zeros((oh, ow), dtype=np.uint8)
    cdef unsigned char[:, ::1] codes = out
    cdef Py_ssize_t y, x
    cdef int i
    cdef unsigned char center, code
    for y in range(oh):
        for x in range(ow):
            center = gray[y + radius, x + radius]
            code = 0
            for i in range(8):
                if gray[y + radius + OFF_Y[i] * radius,
                        x + radius + OFF_X[i] * radius] >= center:
                    code |= <unsigned char> (1 << i)
            codes[y, x] = code
    return out


def assign_labels(const double[:, ::1] points, const double[:, ::1] centroids):
    cdef Py_ssize_t n = points.shape[0]
    cdef Py_ssize_t dim = points.shape[1]
    cdef Py_ssize_t k = centroids.shape[0]
    labels_arr = np.empty(n, dtype=np.int32)
    dists_arr = np.empty(n, dtype=np.float64)
    cdef int[::1] labels = labels_arr
    cdef double[::1] dists = dists_arr
    cdef Py_ssize_t i, j, d
    cdef double best, acc, diff
    cdef int best_j
    for i in range(n):
        best = -1.0
        best_j = 0
        for j in range(k):
            acc = 0.0
            for d in range(dim):
                diff = points[i, d] - centroids[j, d]
                acc += diff * diff
            if best < 0.0 or acc < best:
                best = acc
                best_j = j
        labels[i] = best_j
        dists[i] = best
    return labels_arr, dists_arr
