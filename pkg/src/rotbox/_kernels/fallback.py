"""Pure-Python kernel backend.

Mirrors rotrect_kernels.h expression for expression: same operation order,
same libm calls (math.cos/sin/log/exp), boundary-inclusive point counting.
The grid sweep is vectorized with numpy, whose elementwise float64 ops round
identically to the scalar C code, so both backends agree bit for bit.
"""

from __future__ import annotations

import math

import numpy as np

BACKEND = "python"

_HALF_PI = math.pi / 2

_grid_cache: dict[int, np.ndarray] = {}


def _grid_coords(n: int) -> np.ndarray:
    g = _grid_cache.get(n)
    if g is None:
        g = (np.arange(n, dtype=np.float64) + 0.5) / n - 0.5
        g.setflags(write=False)
        _grid_cache[n] = g
    return g


def angle_mod_pi(alpha: float) -> float:
    a = math.fmod(alpha, math.pi)
    if a < 0.0:
        a += math.pi
    if a >= math.pi:
        a = 0.0
    return a + 0.0


def canon(alpha: float, h: float, w: float) -> tuple[float, float, float]:
    if h < w:
        h, w = w, h
        alpha = alpha + _HALF_PI
    return angle_mod_pi(alpha), h, w


def fast_iou(x1, y1, a1, h1, w1, x2, y2, a2, h2, w2, n):
    c1 = math.cos(a1)
    s1 = math.sin(a1)
    c2 = math.cos(a2)
    s2 = math.sin(a2)
    u = c2 * x2 + s2 * y2
    v = c2 * y2 - s2 * x2
    ex = 0.5 * w2
    ey = 0.5 * h2
    g = _grid_coords(n)
    sx = w1 * g[None, :]
    sy = h1 * g[:, None]
    px = x1 + (c1 * sx - s1 * sy)
    py = y1 + (s1 * sx + c1 * sy)
    qx = c2 * px + s2 * py
    qy = c2 * py - s2 * px
    inside = (np.abs(qx - u) <= ex) & (np.abs(qy - v) <= ey)
    cnt = int(np.count_nonzero(inside))
    if cnt == 0:
        return 0.0
    nn = float(n) * float(n)
    inter = h1 * w1 * float(cnt) / nn
    denom = h1 * w1 + h2 * w2 - inter
    return inter / denom


def _corners(x, y, a, h, w):
    c = math.cos(a)
    s = math.sin(a)
    ex = 0.5 * w
    ey = 0.5 * h
    local = ((ex, ey), (-ex, ey), (-ex, -ey), (ex, -ey))
    return [(x + (c * lx - s * ly), y + (s * lx + c * ly)) for lx, ly in local]


def exact_iou(x1, y1, a1, h1, w1, x2, y2, a2, h2, w2):
    sub = _corners(0.0, 0.0, a1, h1, w1)
    clip = _corners(x2 - x1, y2 - y1, a2, h2, w2)
    for e in range(4):
        if not sub:
            break
        ax, ay = clip[e]
        bx, by = clip[(e + 1) & 3]
        edx = bx - ax
        edy = by - ay
        out = []
        m = len(sub)
        for i in range(m):
            cx, cy = sub[i]
            qx, qy = sub[i - 1]
            dcur = edx * (cy - ay) - edy * (cx - ax)
            dprev = edx * (qy - ay) - edy * (qx - ax)
            if dcur >= 0.0:
                if not dprev >= 0.0:
                    t = dprev / (dprev - dcur)
                    out.append((qx + t * (cx - qx), qy + t * (cy - qy)))
                out.append((cx, cy))
            elif dprev >= 0.0:
                t = dprev / (dprev - dcur)
                out.append((qx + t * (cx - qx), qy + t * (cy - qy)))
        sub = out
    s = 0.0
    m = len(sub)
    for i in range(m):
        x0, y0 = sub[i]
        xn, yn = sub[(i + 1) % m]
        s += x0 * yn - xn * y0
    inter = 0.5 * s
    if inter < 0.0:
        inter = -inter
    if inter < 1e-12:
        inter = 0.0
    denom = h1 * w1 + h2 * w2 - inter
    iou = inter / denom
    if iou < 0.0:
        iou = 0.0
    if iou > 1.0:
        iou = 1.0
    return iou


def fast_iou_matrix(a: np.ndarray, b: np.ndarray, n: int) -> np.ndarray:
    out = np.empty((a.shape[0], b.shape[0]), dtype=np.float64)
    for i, ra in enumerate(a):
        for j, rb in enumerate(b):
            out[i, j] = fast_iou(ra[0], ra[1], ra[2], ra[3], ra[4],
                                 rb[0], rb[1], rb[2], rb[3], rb[4], n)
    return out


def exact_iou_matrix(a: np.ndarray, b: np.ndarray) -> np.ndarray:
    out = np.empty((a.shape[0], b.shape[0]), dtype=np.float64)
    for i, ra in enumerate(a):
        for j, rb in enumerate(b):
            out[i, j] = exact_iou(ra[0], ra[1], ra[2], ra[3], ra[4],
                                  rb[0], rb[1], rb[2], rb[3], rb[4])
    return out


def nms_keep(boxes: np.ndarray, thresh: float, n: int) -> np.ndarray:
    k = boxes.shape[0]
    suppressed = np.zeros(k, dtype=bool)
    kept = []
    for i in range(k):
        if suppressed[i]:
            continue
        kept.append(i)
        bi = boxes[i]
        for j in range(i + 1, k):
            if suppressed[j]:
                continue
            bj = boxes[j]
            if fast_iou(bi[0], bi[1], bi[2], bi[3], bi[4],
                        bj[0], bj[1], bj[2], bj[3], bj[4], n) > thresh:
                suppressed[j] = True
    return np.asarray(kept, dtype=np.int64)


def encode_one(xa, ya, aa, ha, wa, xg, yg, ag, hg, wg):
    tx = (xg - xa) / wa
    ty = (yg - ya) / ha
    ta = ag - aa
    th = math.log(hg / ha)
    tw = math.log(wg / wa)
    return tx, ty, ta, th, tw


def decode_one(xa, ya, aa, ha, wa, tx, ty, ta, th, tw):
    """Returns the decoded canonical 5-tuple, or None for an invalid delta."""
    for t in (tx, ty, ta, th, tw):
        if not math.isfinite(t):
            return None
    if th > 20.0 or th < -20.0 or tw > 20.0 or tw < -20.0:
        return None
    x = xa + tx * wa
    y = ya + ty * ha
    a = aa + ta
    h = ha * math.exp(th)
    w = wa * math.exp(tw)
    if not (math.isfinite(x) and math.isfinite(y) and math.isfinite(h) and math.isfinite(w)):
        return None
    if h <= 0.0 or w <= 0.0:
        return None
    a, h, w = canon(a, h, w)
    return x, y, a, h, w
