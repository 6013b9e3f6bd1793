"""Detection evaluation: TP/FP matching, precision-recall sweep, and AP.

Matching is gt-centric: among all (detection, gt) pairs whose exact IoU
strictly exceeds the cut, the highest-IoU pair is matched first, both sides
are retired, and the process repeats.  A detection matches at most one gt;
with several detections on one gt, only the highest-overlap one counts as a
true positive.  Evaluation always uses the exact IoU so the metric carries
no estimator error.

The sweep pools detections across images by descending score; every prefix
is matched per image under the same rule, giving one (recall, precision)
point per prefix.  AP is the area under the precision envelope
max{p_j : r_j >= r}, a step function integrated over recall.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Sequence

import numpy as np

from rotbox.errors import InvalidParameterError
from rotbox.geometry import RotatedRect, iou_matrix
from rotbox.postprocess import Detection

__all__ = ["MatchReport", "PrCurve", "match_image", "pr_curve"]

DEFAULT_IOU_CUT = 0.5


@dataclass(frozen=True)
class MatchReport:
    """Outcome of matching one image: det_to_gt[i] is the gt index matched
    by detection i (None for a false positive); gt_to_det is the inverse
    view (None for a missed gt).  Matched pairs form a bijection."""

    det_to_gt: tuple[int | None, ...]
    gt_to_det: tuple[int | None, ...]

    @property
    def tp(self) -> int:
        return sum(1 for g in self.det_to_gt if g is not None)

    @property
    def fp(self) -> int:
        return sum(1 for g in self.det_to_gt if g is None)

    @property
    def fn(self) -> int:
        return sum(1 for d in self.gt_to_det if d is None)


@dataclass(frozen=True)
class PrCurve:
    """Score-sweep (recall, precision) points plus the envelope-area AP."""

    points: tuple[tuple[float, float], ...]
    ap: float


def _greedy_pairs(iou: np.ndarray, cut: float) -> list[tuple[int, int]]:
    """Repeatedly match the best remaining pair with IoU > cut."""
    n_det, n_gt = iou.shape
    if n_det == 0 or n_gt == 0:
        return []
    work = iou.copy()
    pairs = []
    for _ in range(min(n_det, n_gt)):
        flat = int(np.argmax(work))
        d, g = divmod(flat, n_gt)
        if not work[d, g] > cut:
            break
        pairs.append((d, g))
        work[d, :] = -1.0
        work[:, g] = -1.0
    return pairs


def _det_rects(dets: Sequence[Detection], where: str) -> list[RotatedRect]:
    rects = []
    for i, d in enumerate(dets):
        if not isinstance(d, Detection):
            raise InvalidParameterError(
                f"{where}[{i}]: expected Detection, got {type(d).__name__}"
            )
        rects.append(d.rect)
    return rects


def match_image(
    dets: Sequence[Detection],
    gts: Sequence[RotatedRect],
    iou_cut: float = DEFAULT_IOU_CUT,
    mode: str = "exact",
    n: int = 128,
) -> MatchReport:
    """Match one image's detections against its ground truth.

    The default exact mode keeps the metric free of estimator error;
    mode="fast" with a grid size n trades that for speed.
    """
    if not 0.0 <= iou_cut <= 1.0:
        raise InvalidParameterError(f"iou_cut must be in [0, 1], got {iou_cut}")
    rects = _det_rects(dets, "dets")
    iou = iou_matrix(rects, gts, mode=mode, n=n)
    det_to_gt: list[int | None] = [None] * len(dets)
    gt_to_det: list[int | None] = [None] * len(gts)
    for d, g in _greedy_pairs(iou, iou_cut):
        det_to_gt[d] = g
        gt_to_det[g] = d
    return MatchReport(det_to_gt=tuple(det_to_gt), gt_to_det=tuple(gt_to_det))


def _envelope_ap(points: Sequence[tuple[float, float]]) -> float:
    if not points:
        return 0.0
    env: dict[float, float] = {}
    best = 0.0
    for r, p in reversed(points):
        if p > best:
            best = p
        env[r] = best
    ap = 0.0
    prev = 0.0
    for r in sorted(env):
        if r > prev:
            ap += (r - prev) * env[r]
            prev = r
    return ap


def pr_curve(
    samples: Sequence[tuple[Sequence[Detection], Sequence[RotatedRect]]],
    iou_cut: float = DEFAULT_IOU_CUT,
    mode: str = "exact",
    n: int = 128,
) -> PrCurve:
    """Sweep all detections across images and integrate the PR envelope.

    samples holds one (detections, ground truths) pair per image.  Raises
    when there is no ground truth at all (recall is undefined).  Matching
    defaults to exact IoU; mode="fast" uses the grid estimate at size n.
    """
    if not 0.0 <= iou_cut <= 1.0:
        raise InvalidParameterError(f"iou_cut must be in [0, 1], got {iou_cut}")
    per_image = []
    total_gt = 0
    pool_scores = []
    pool_ref = []
    for im, (dets, gts) in enumerate(samples):
        rects = _det_rects(dets, f"samples[{im}].dets")
        iou = iou_matrix(rects, list(gts), mode=mode, n=n)
        per_image.append(iou)
        total_gt += len(gts)
        for di, d in enumerate(dets):
            pool_scores.append(d.score)
            pool_ref.append((im, di))
    if total_gt == 0:
        raise InvalidParameterError("no ground-truth boxes: recall is undefined")

    order = np.argsort(-np.asarray(pool_scores, dtype=np.float64), kind="stable")
    active: dict[int, list[int]] = {}
    tp_image: dict[int, int] = {}
    points: list[tuple[float, float]] = []
    tp = 0
    for k, oi in enumerate(order):
        im, di = pool_ref[int(oi)]
        rows = active.setdefault(im, [])
        rows.append(di)
        new_tp = len(_greedy_pairs(per_image[im][rows, :], iou_cut))
        tp += new_tp - tp_image.get(im, 0)
        tp_image[im] = new_tp
        points.append((tp / total_gt, tp / (k + 1)))
    return PrCurve(points=tuple(points), ap=_envelope_ap(points))
