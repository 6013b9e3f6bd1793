"""Array-based bindings for rotated-rectangle geometry kernels.

The surface mirrors the rotbox scalar API over contiguous float64 arrays
with rows laid out as (x, y, alpha, h, w[, score]): batch fast/exact IoU,
greedy NMS, box-delta encode/decode, and anchor-field generation.  Results
are bit-identical to looping the rotbox scalar functions over the same
rows.  Rows only need to be canonicalizable; they are canonicalized on a
private copy, and no call ever mutates caller-owned arrays.  The heavy
loops release the GIL, so callers may parallelize across threads.
"""

from __future__ import annotations

import math

import numpy as np

from rotbox_bindings import _batch

__version__ = "0.1.0"

__all__ = [
    "iou_batch",
    "nms_batch",
    "encode_batch",
    "decode_batch",
    "generate_anchors",
]


def _as_rows(arr, name: str, cols: int = 5) -> np.ndarray:
    out = np.array(arr, dtype=np.float64, order="C", copy=True)
    if out.ndim != 2 or out.shape[1] != cols:
        raise ValueError(f"{name} must have shape (K, {cols}), got {np.asarray(arr).shape}")
    bad = np.flatnonzero(~np.isfinite(out).all(axis=1))
    if bad.size:
        i = int(bad[0])
        raise ValueError(f"{name}[{i}]: all fields must be finite, got {tuple(out[i])}")
    return out


def _canon_rows(arr, name: str) -> np.ndarray:
    out = _as_rows(arr, name)
    bad = np.flatnonzero((out[:, 3] <= 0.0) | (out[:, 4] <= 0.0))
    if bad.size:
        i = int(bad[0])
        raise ValueError(
            f"{name}[{i}]: sides must be positive, got h={out[i, 3]}, w={out[i, 4]}"
        )
    _batch.canon_rows(out)
    return out


def _check_n(n) -> int:
    if not isinstance(n, int) or isinstance(n, bool) or n < 1:
        raise ValueError(f"grid side must be a positive integer, got {n!r}")
    return n


def iou_batch(a, b, n: int = 32, mode: str = "fast") -> np.ndarray:
    """Pairwise IoU of two box arrays as a (K, M) matrix.

    mode="fast" runs the grid estimator with a[i] seeding the grid;
    mode="exact" runs the clipping oracle.
    """
    if mode not in ("fast", "exact"):
        raise ValueError(f"mode must be 'fast' or 'exact', got {mode!r}")
    pa = _canon_rows(a, "a")
    pb = _canon_rows(b, "b")
    if mode == "fast":
        _check_n(n)
        return _batch.fast_pairs(pa, pb, n)
    return _batch.exact_pairs(pa, pb)


def nms_batch(boxes, thresh: float, n: int = 32, scores=None) -> np.ndarray:
    """Greedy rotated NMS; returns kept row indices by descending score.

    boxes is (K, 5) with scores passed separately, or (K, 6) with scores in
    the last column.  Ties keep input order; suppression is strictly
    greater-than with the kept box seeding the grid.
    """
    raw = np.asarray(boxes, dtype=np.float64)
    if raw.ndim != 2 or raw.shape[1] not in (5, 6):
        raise ValueError(f"boxes must have shape (K, 5) or (K, 6), got {raw.shape}")
    if raw.shape[1] == 6:
        if scores is not None:
            raise ValueError("scores passed twice: in boxes[:, 5] and as an argument")
        scores = raw[:, 5]
        raw = raw[:, :5]
    elif scores is None:
        raise ValueError("scores are required when boxes has shape (K, 5)")
    sc = np.array(scores, dtype=np.float64, copy=True)
    if sc.shape != (raw.shape[0],):
        raise ValueError(f"scores must have shape ({raw.shape[0]},), got {sc.shape}")
    bad = np.flatnonzero(~(np.isfinite(sc) & (sc >= 0.0) & (sc <= 1.0)))
    if bad.size:
        i = int(bad[0])
        raise ValueError(f"scores[{i}]: score must be in [0, 1], got {sc[i]}")
    if not 0.0 <= thresh <= 1.0:
        raise ValueError(f"iou_thresh must be in [0, 1], got {thresh}")
    _check_n(n)
    packed = _canon_rows(raw, "boxes")
    if packed.shape[0] == 0:
        return np.empty(0, dtype=np.int64)
    order = np.argsort(-sc, kind="stable")
    kept = _batch.nms_keep(np.ascontiguousarray(packed[order]), float(thresh), n)
    return order[kept].astype(np.int64)


def encode_batch(anchors, boxes) -> np.ndarray:
    """Row-wise box-to-anchor deltas (tx, ty, talpha, th, tw)."""
    pa = _canon_rows(anchors, "anchors")
    pb = _canon_rows(boxes, "boxes")
    if pa.shape != pb.shape:
        raise ValueError(f"anchors and boxes must align, got {pa.shape} vs {pb.shape}")
    return _batch.encode_rows(pa, pb)


def decode_batch(anchors, deltas) -> np.ndarray:
    """Row-wise inverse of encode_batch; outputs canonical boxes."""
    pa = _canon_rows(anchors, "anchors")
    pd = _as_rows(deltas, "deltas")
    if pa.shape != pd.shape:
        raise ValueError(f"anchors and deltas must align, got {pa.shape} vs {pd.shape}")
    out, bad = _batch.decode_rows(pa, pd)
    if bad >= 0:
        raise ValueError(
            f"deltas[{bad}]: delta {tuple(pd[bad])} does not decode to a valid rectangle"
        )
    return out


def generate_anchors(
    feat_width: int,
    feat_height: int,
    stride: float,
    scales,
    angles,
    aspect: float = 1.0,
) -> np.ndarray:
    """Anchor field rows ordered row-major, then by scale, then angle.

    scales are areas (px^2); angles are radians, reduced into [0, pi);
    aspect is the h:w ratio with h the long side.
    """
    for name, v in (("feat_width", feat_width), ("feat_height", feat_height)):
        if not isinstance(v, int) or isinstance(v, bool) or v < 1:
            raise ValueError(f"{name} must be a positive integer, got {v!r}")
    stride = float(stride)
    if not math.isfinite(stride) or stride < 1:
        raise ValueError(f"stride must be >= 1, got {stride!r}")
    scales = np.asarray(scales, dtype=np.float64).ravel()
    if scales.size == 0 or not np.isfinite(scales).all() or (scales <= 0).any():
        raise ValueError("scales must be nonempty positive areas")
    angles = np.asarray(angles, dtype=np.float64).ravel()
    if angles.size == 0 or not np.isfinite(angles).all():
        raise ValueError("angles must be nonempty and finite")
    aspect = float(aspect)
    if not math.isfinite(aspect) or aspect < 1.0:
        raise ValueError(f"aspect is h:w with h the long side, must be >= 1, got {aspect!r}")
    scale_h = np.array([math.sqrt(s * aspect) for s in scales])
    scale_w = np.array([math.sqrt(s / aspect) for s in scales])
    canon_angles = np.array([_batch.angle_mod_pi(float(a)) for a in angles])
    return _batch.anchor_rows(feat_width, feat_height, stride, scale_h, scale_w, canon_angles)
