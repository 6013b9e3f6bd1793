"""Greedy rotated non-maximum suppression over scored detections."""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Sequence

import numpy as np

from rotbox._kernels import impl
from rotbox.errors import InvalidParameterError, InvalidRectError
from rotbox.geometry import DEFAULT_GRID_N, RotatedRect

__all__ = ["Detection", "nms"]


@dataclass(frozen=True)
class Detection:
    """A rectangle with its confidence score in [0, 1]."""

    rect: RotatedRect
    score: float

    def __post_init__(self):
        if not isinstance(self.rect, RotatedRect):
            raise InvalidRectError(f"rect must be a RotatedRect, got {type(self.rect).__name__}")
        s = self.score
        if not isinstance(s, (int, float)) or isinstance(s, bool) or not math.isfinite(s):
            raise InvalidParameterError(f"score must be finite, got {s!r}")
        if not 0.0 <= s <= 1.0:
            raise InvalidParameterError(f"score must be in [0, 1], got {s}")
        object.__setattr__(self, "score", float(s))


def nms(
    dets: Sequence[Detection],
    iou_thresh: float,
    n: int = DEFAULT_GRID_N,
) -> list[Detection]:
    """Keep the highest-scoring detections, dropping overlaps.

    Detections are visited by descending score (ties keep input order); each
    kept detection suppresses later ones whose grid-estimated IoU with it
    strictly exceeds iou_thresh, the kept box seeding the grid.  A threshold
    of 1.0 therefore disables suppression.  Output is score-sorted and a
    subset of the input.
    """
    if not 0.0 <= iou_thresh <= 1.0:
        raise InvalidParameterError(f"iou_thresh must be in [0, 1], got {iou_thresh}")
    if not isinstance(n, int) or isinstance(n, bool) or n < 1:
        raise InvalidParameterError(f"grid side must be a positive integer, got {n!r}")
    if not dets:
        return []
    boxes = np.empty((len(dets), 5), dtype=np.float64)
    scores = np.empty(len(dets), dtype=np.float64)
    for i, d in enumerate(dets):
        if not isinstance(d, Detection):
            raise InvalidParameterError(f"dets[{i}]: expected Detection, got {type(d).__name__}")
        r = d.rect
        boxes[i] = (r.x, r.y, r.alpha, r.h, r.w)
        scores[i] = d.score
    order = np.argsort(-scores, kind="stable")
    kept = impl.nms_keep(np.ascontiguousarray(boxes[order]), float(iou_thresh), n)
    return [dets[int(order[k])] for k in kept]
