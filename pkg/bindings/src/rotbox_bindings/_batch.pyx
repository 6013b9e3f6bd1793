# cython: language_level=3, boundscheck=False, wraparound=False, cdivision=True
"""Batch compute loops over the shared scalar kernels.

All loops run with the GIL released; callers may invoke them from several
threads at once.  Inputs are validated and copied by the package __init__,
so nothing here ever writes into caller-owned memory.
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


def canon_rows(double[:, ::1] boxes):
    """Canonicalize rows in place (the caller passes its own copy)."""
    cdef Py_ssize_t i, k = boxes.shape[0]
    cdef double a, h, w
    with nogil:
        for i in range(k):
            a = boxes[i, 2]
            h = boxes[i, 3]
            w = boxes[i, 4]
            rk_canon(&a, &h, &w)
            boxes[i, 2] = a
            boxes[i, 3] = h
            boxes[i, 4] = w


def angle_mod_pi(double alpha):
    return rk_angle_mod_pi(alpha)


def fast_pairs(double[:, ::1] a, double[:, ::1] b, int n):
    cdef Py_ssize_t i, j, ka = a.shape[0], kb = b.shape[0]
    out = np.empty((ka, kb), dtype=np.float64)
    cdef double[:, ::1] o = out
    with nogil:
        for i in range(ka):
            for j in range(kb):
                o[i, j] = rk_fast_iou(a[i, 0], a[i, 1], a[i, 2], a[i, 3], a[i, 4],
                                      b[j, 0], b[j, 1], b[j, 2], b[j, 3], b[j, 4], n)
    return out


def exact_pairs(double[:, ::1] a, double[:, ::1] b):
    cdef Py_ssize_t i, j, ka = a.shape[0], kb = b.shape[0]
    out = np.empty((ka, kb), dtype=np.float64)
    cdef double[:, ::1] o = out
    with nogil:
        for i in range(ka):
            for j in range(kb):
                o[i, j] = rk_exact_iou(a[i, 0], a[i, 1], a[i, 2], a[i, 3], a[i, 4],
                                       b[j, 0], b[j, 1], b[j, 2], b[j, 3], b[j, 4])
    return out


def nms_keep(double[:, ::1] boxes, double thresh, int n):
    """Greedy suppression over score-sorted rows; strict > comparison with
    the kept box seeding the grid."""
    cdef Py_ssize_t k = boxes.shape[0]
    cdef Py_ssize_t i, j, nkept = 0
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


def encode_rows(double[:, ::1] anchors, double[:, ::1] boxes):
    cdef Py_ssize_t i, k = anchors.shape[0]
    out = np.empty((k, 5), dtype=np.float64)
    cdef double[:, ::1] o = out
    with nogil:
        for i in range(k):
            rk_encode(anchors[i, 0], anchors[i, 1], anchors[i, 2], anchors[i, 3], anchors[i, 4],
                      boxes[i, 0], boxes[i, 1], boxes[i, 2], boxes[i, 3], boxes[i, 4],
                      &o[i, 0])
    return out


def decode_rows(double[:, ::1] anchors, double[:, ::1] deltas):
    """Returns (boxes, first_bad_row); first_bad_row is -1 when all decode."""
    cdef Py_ssize_t i, k = anchors.shape[0]
    cdef Py_ssize_t bad = -1
    out = np.empty((k, 5), dtype=np.float64)
    cdef double[:, ::1] o = out
    with nogil:
        for i in range(k):
            if rk_decode(anchors[i, 0], anchors[i, 1], anchors[i, 2], anchors[i, 3], anchors[i, 4],
                         deltas[i, 0], deltas[i, 1], deltas[i, 2], deltas[i, 3], deltas[i, 4],
                         &o[i, 0]) != 0:
                bad = i
                break
    return out, bad


def anchor_rows(int feat_width, int feat_height, double stride,
                double[::1] scale_h, double[::1] scale_w, double[::1] angles):
    """Anchor field rows ordered row-major, then scale, then angle; the
    caller precomputes per-scale sides (h, w) and canonical angles."""
    cdef Py_ssize_t ns = scale_h.shape[0], na = angles.shape[0]
    cdef Py_ssize_t row, col, si, ai, idx = 0
    cdef double cx, cy
    out = np.empty((feat_width * feat_height * ns * na, 5), dtype=np.float64)
    cdef double[:, ::1] o = out
    with nogil:
        for row in range(feat_height):
            cy = (row + 0.5) * stride
            for col in range(feat_width):
                cx = (col + 0.5) * stride
                for si in range(ns):
                    for ai in range(na):
                        o[idx, 0] = cx
                        o[idx, 1] = cy
                        o[idx, 2] = angles[ai]
                        o[idx, 3] = scale_h[si]
                        o[idx, 4] = scale_w[si]
                        idx += 1
    return out
