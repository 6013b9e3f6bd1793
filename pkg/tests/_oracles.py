"""Independent reference implementations used to check the library.

Everything here is deliberately written from scratch against the math, not
the library code paths it verifies: an axis-aligned IoU formula, a
full-scan greedy matcher, and a prefix-enumerating AP evaluation.
"""

from __future__ import annotations

import math

import numpy as np

from rotbox.geometry import RotatedRect, exact_iou


def aabb_iou(r1: RotatedRect, r2: RotatedRect) -> float:
    """Textbook axis-aligned IoU; valid only when both angles are zero.

    At angle zero the short side w spans x and the long side h spans y.
    """
    assert r1.alpha == 0.0 and r2.alpha == 0.0
    ox = min(r1.x + r1.w / 2, r2.x + r2.w / 2) - max(r1.x - r1.w / 2, r2.x - r2.w / 2)
    oy = min(r1.y + r1.h / 2, r2.y + r2.h / 2) - max(r1.y - r1.h / 2, r2.y - r2.h / 2)
    if ox <= 0.0 or oy <= 0.0:
        return 0.0
    inter = ox * oy
    return inter / (r1.h * r1.w + r2.h * r2.w - inter)


def random_axis_aligned_pairs(count: int, seed: int):
    """Random canonical rect pairs with alpha = 0 for the AABB cross-check."""
    rng = np.random.default_rng(seed)
    pairs = []
    for _ in range(count):
        rects = []
        for _ in range(2):
            x, y = rng.uniform(0, 448, 2)
            s = rng.uniform(20, 200, 2)
            rects.append(RotatedRect(float(x), float(y), 0.0, float(max(s)), float(min(s))))
        pairs.append((rects[0], rects[1]))
    return pairs


def greedy_match_count(det_rects, gts, cut: float) -> int:
    """Full-scan greedy matching: repeatedly take the best remaining
    (detection, gt) pair with exact IoU strictly above the cut."""
    used_d: set[int] = set()
    used_g: set[int] = set()
    count = 0
    while True:
        best_v = cut
        best = None
        for d in range(len(det_rects)):
            if d in used_d:
                continue
            for g in range(len(gts)):
                if g in used_g:
                    continue
                v = exact_iou(det_rects[d], gts[g])
                if v > best_v:
                    best_v = v
                    best = (d, g)
        if best is None:
            return count
        used_d.add(best[0])
        used_g.add(best[1])
        count += 1


def brute_force_ap(samples, cut: float) -> float:
    """AP by explicit prefix enumeration plus an O(P^2) envelope scan."""
    total_gt = sum(len(gts) for _, gts in samples)
    pool = []
    for im, (dets, _) in enumerate(samples):
        for di, d in enumerate(dets):
            pool.append((im, di, d.score))
    order = sorted(range(len(pool)), key=lambda i: -pool[i][2])
    # sorted() is stable, so ties keep pool order, same as the library sweep
    points = []
    for k in range(1, len(order) + 1):
        prefix = [pool[i] for i in order[:k]]
        tp = 0
        for im, (dets, gts) in enumerate(samples):
            sel = [dets[di].rect for (im2, di, _) in prefix if im2 == im]
            tp += greedy_match_count(sel, gts, cut)
        points.append((tp / total_gt, tp / k))
    if not points:
        return 0.0
    recalls = sorted({r for r, _ in points})
    ap = 0.0
    prev = 0.0
    for r in recalls:
        if r <= prev:
            continue
        env = max(p for rr, p in points if rr >= r)
        ap += (r - prev) * env
        prev = r
    return ap


def octagon_iou() -> float:
    """Closed form for a unit square against its 45-degree rotation.

    The intersection is a regular octagon of area 2*(sqrt(2)-1); the IoU
    simplifies to 1/sqrt(2).
    """
    inter = 2.0 * (math.sqrt(2.0) - 1.0)
    return inter / (2.0 - inter)
