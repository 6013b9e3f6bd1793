# cython: language_level=3, boundscheck=False, wraparound=False, cdivision=True
"""Compiled kernel backend.

Thin wrappers over the C kernels in rotrect_kernels.h plus the batch loops
used by iou matrices and NMS.  Batch loops run with the GIL released.
"""

import numpy as np

cdef extern from "rotrect_kernels.h" nogil:
    double rk_angle_mod_pi(double alpha)
    void rk_canon(double *alpha, double *h, double *w)
    double rk_fast_iou(double x1, double y1, double a1, double h1, double w1,
                       double x2, double y2, double a2, double h2, double w2, int n)
    double rk_exact_iou(double x1, double y1, double a1, double h1, double w1,
                        double x2, double y2, double a2, double h2, double w2)
    void rk_encode(double xa, double ya, double aa, double ha, double wa,
                   double xg, double yg, double ag, double hg, double wg, double *t)
    int rk_decode(double xa, double ya, double aa, double ha, double wa,
                  double tx, double ty, double ta, double th, double tw, double *out)

BACKEND = "native"


def angle_mod_pi(double alpha):
    return rk_angle_mod_pi(alpha)


def canon(double alpha, double h, double w):
    rk_canon(&alpha, &h, &w)
    return alpha, h, w


def fast_iou(double x1, double y1, double a1, double h1, double w1,
             double x2, double y2, double a2, double h2, double w2, int n):
    cdef double r
    with nogil:
        r = rk_fast_iou(x1, y1, a1, h1, w1, x2, y2, a2, h2, w2, n)
    return r


def exact_iou(double x1, double y1, double a1, double h1, double w1,
              double x2, double y2, double a2, double h2, double w2):
    cdef double r
    with nogil:
        r = rk_exact_iou(x1, y1, a1, h1, w1, x2, y2, a2, h2, w2)
    return r


def fast_iou_matrix(double[:, ::1] a, double[:, ::1] b, int n):
    cdef Py_ssize_t i, j
    cdef Py_ssize_t ka = a.shape[0], kb = b.shape[0]
    out = np.empty((ka, kb), dtype=np.float64)
    cdef double[:, ::1] o = out
    with nogil:
        for i in range(ka):
            for j in range(kb):
                o[i, j] = rk_fast_iou(a[i, 0], a[i, 1], a[i, 2], a[i, 3], a[i, 4],
                                      b[j, 0], b[j, 1], b[j, 2], b[j, 3], b[j, 4], n)
    return out


def exact_iou_matrix(double[:, ::1] a, double[:, ::1] b):
    cdef Py_ssize_t i, j
    cdef Py_ssize_t ka = a.shape[0], kb = b.shape[0]
    out = np.empty((ka, kb), dtype=np.float64)
    cdef double[:, ::1] o = out
    with nogil:
        for i in range(ka):
            for j in range(kb):
                o[i, j] = rk_exact_iou(a[i, 0], a[i, 1], a[i, 2], a[i, 3], a[i, 4],
                                       b[j, 0], b[j, 1], b[j, 2], b[j, 3], b[j, 4])
    return out


def nms_keep(double[:, ::1] boxes, double thresh, int n):
    """Greedy suppression over score-sorted boxes; returns kept positions.

    Suppression compares the kept box as the grid-seeding rectangle and is
    strictly greater-than, so thresh=1.0 suppresses nothing.
    """
    cdef Py_ssize_t k = boxes.shape[0]
    cdef Py_ssize_t i, j
    cdef Py_ssize_t nkept = 0
    suppressed = np.zeros(k, dtype=np.uint8)
    kept = np.empty(k, dtype=np.int64)
    cdef unsigned char[::1] sup = suppressed
    cdef long[::1] kp = kept
    with nogil:
        for i in range(k):
            if sup[i]:
                continue
            kp[nkept] = i
            nkept += 1
            for j in range(i + 1, k):
                if sup[j]:
                    continue
                if rk_fast_iou(boxes[i, 0], boxes[i, 1], boxes[i, 2], boxes[i, 3], boxes[i, 4],
                               boxes[j, 0], boxes[j, 1], boxes[j, 2], boxes[j, 3], boxes[j, 4],
                               n) > thresh:
                    sup[j] = 1
    return kept[:nkept].copy()


def encode_one(double xa, double ya, double aa, double ha, double wa,
               double xg, double yg, double ag, double hg, double wg):
    cdef double t[5]
    rk_encode(xa, ya, aa, ha, wa, xg, yg, ag, hg, wg, t)
    return t[0], t[1], t[2], t[3], t[4]


def decode_one(double xa, double ya, double aa, double ha, double wa,
               double tx, double ty, double ta, double th, double tw):
    """Returns the decoded canonical 5-tuple, or None for an invalid delta."""
    cdef double out[5]
    if rk_decode(xa, ya, aa, ha, wa, tx, ty, ta, th, tw, out) != 0:
        return None
    return out[0], out[1], out[2], out[3], out[4]
