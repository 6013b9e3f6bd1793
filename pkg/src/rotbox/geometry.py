"""Oriented rectangles and their IoU: a fast grid-sampling estimator and an
exact clipping oracle.

A rectangle is (x, y, alpha, h, w): center, rotation in radians, long side
h, short side w.  The short side spans the local x axis, the long side the
local y axis, and M(alpha) = [[cos a, -sin a], [sin a, cos a]] rotates the
local frame into image coordinates.  Canonical form fixes h >= w and
alpha in [0, pi); every rectangle is symmetric under alpha -> alpha + pi
and under a side swap plus quarter turn, so canonical form is unique.

The estimator maps an n x n lattice of cell centers from [-0.5, 0.5]^2 into
the first rectangle, rotates everything so the second rectangle becomes
axis-aligned, and counts interior points (boundary inclusive):

    I   = h1 * w1 * count / n^2
    IoU = I / (h1 * w1 + h2 * w2 - I)

The estimator is asymmetric (the grid seeds the first rectangle); the exact
oracle clips the first rectangle's corner polygon against the second and is
symmetric up to rounding.  IoU matrices come back as C-contiguous
(rows, cols) float64 arrays with every entry in [0, 1].
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Sequence

import numpy as np

from rotbox._kernels import impl
from rotbox._kernels.fallback import _grid_coords
from rotbox.errors import InvalidParameterError, InvalidRectError

__all__ = [
    "RotatedRect",
    "PointGrid",
    "canonicalize",
    "make_grid",
    "fast_iou",
    "exact_iou",
    "iou_matrix",
    "sample_rect_pairs",
]

DEFAULT_GRID_N = 32
EVAL_GRID_N = 128


@dataclass(frozen=True)
class RotatedRect:
    """Canonical oriented rectangle; construct arbitrary params via canonicalize()."""

    x: float
    y: float
    alpha: float
    h: float
    w: float

    def __post_init__(self):
        for name in ("x", "y", "alpha", "h", "w"):
            v = getattr(self, name)
            if not isinstance(v, (int, float)) or isinstance(v, bool) or not math.isfinite(v):
                raise InvalidRectError(f"{name} must be finite, got {v!r}")
            object.__setattr__(self, name, float(v))
        if self.h <= 0.0 or self.w <= 0.0:
            raise InvalidRectError(f"sides must be positive, got h={self.h}, w={self.w}")
        if self.h < self.w:
            raise InvalidRectError(f"not canonical: h={self.h} < w={self.w}")
        if not 0.0 <= self.alpha < math.pi:
            raise InvalidRectError(f"not canonical: alpha={self.alpha} outside [0, pi)")

    @property
    def area(self) -> float:
        return self.h * self.w

    def corners(self) -> np.ndarray:
        """4x2 corner coordinates in counter-clockwise order."""
        c = math.cos(self.alpha)
        s = math.sin(self.alpha)
        ex = 0.5 * self.w
        ey = 0.5 * self.h
        local = ((ex, ey), (-ex, ey), (-ex, -ey), (ex, -ey))
        return np.array(
            [(self.x + (c * lx - s * ly), self.y + (s * lx + c * ly)) for lx, ly in local]
        )

    def astuple(self) -> tuple[float, float, float, float, float]:
        return (self.x, self.y, self.alpha, self.h, self.w)


@dataclass(frozen=True)
class PointGrid:
    """n^2 sampling points at cell centers of an n x n split of [-0.5, 0.5]^2."""

    n: int
    points: np.ndarray

    def __len__(self) -> int:
        return self.n * self.n


def canonicalize(x: float, y: float, alpha: float, h: float, w: float) -> RotatedRect:
    """Build the canonical rectangle for arbitrary side/angle parameters.

    If h < w the sides are swapped and the frame turned a quarter turn;
    the angle is then reduced modulo pi into [0, pi).  The result describes
    the same point set as the input.
    """
    for name, v in (("x", x), ("y", y), ("alpha", alpha), ("h", h), ("w", w)):
        if not isinstance(v, (int, float)) or isinstance(v, bool) or not math.isfinite(v):
            raise InvalidRectError(f"{name} must be finite, got {v!r}")
    if h <= 0.0 or w <= 0.0:
        raise InvalidRectError(f"sides must be positive, got h={h}, w={w}")
    a, hh, ww = impl.canon(float(alpha), float(h), float(w))
    return RotatedRect(float(x), float(y), a, hh, ww)


def make_grid(n: int) -> PointGrid:
    """Lattice of n^2 cell centers: coordinate k maps to (k + 0.5)/n - 0.5."""
    if not isinstance(n, int) or isinstance(n, bool) or n < 1:
        raise InvalidParameterError(f"grid side must be a positive integer, got {n!r}")
    g = _grid_coords(n)
    pts = np.empty((n * n, 2), dtype=np.float64)
    pts[:, 0] = np.tile(g, n)
    pts[:, 1] = np.repeat(g, n)
    pts.setflags(write=False)
    return PointGrid(n=n, points=pts)


def _check_n(n: int) -> int:
    if not isinstance(n, int) or isinstance(n, bool) or n < 1:
        raise InvalidParameterError(f"grid side must be a positive integer, got {n!r}")
    return n


def _check_rect(r: RotatedRect, where: str = "rect") -> RotatedRect:
    if not isinstance(r, RotatedRect):
        raise InvalidRectError(f"{where}: expected RotatedRect, got {type(r).__name__}")
    return r


def fast_iou(r1: RotatedRect, r2: RotatedRect, n: int = DEFAULT_GRID_N) -> float:
    """Grid-sampled IoU estimate; n controls preciseness, error ~ O(1/n).

    The grid seeds r1, so the estimate is not symmetric in its arguments.
    Disjoint rectangles give exactly 0.0; identical ones exactly 1.0.
    """
    _check_rect(r1, "r1")
    _check_rect(r2, "r2")
    _check_n(n)
    return impl.fast_iou(r1.x, r1.y, r1.alpha, r1.h, r1.w,
                         r2.x, r2.y, r2.alpha, r2.h, r2.w, n)


def exact_iou(r1: RotatedRect, r2: RotatedRect) -> float:
    """Exact IoU via convex clipping + shoelace; symmetric up to rounding."""
    _check_rect(r1, "r1")
    _check_rect(r2, "r2")
    return impl.exact_iou(r1.x, r1.y, r1.alpha, r1.h, r1.w,
                          r2.x, r2.y, r2.alpha, r2.h, r2.w)


def _pack(rects: Sequence[RotatedRect], name: str) -> np.ndarray:
    out = np.empty((len(rects), 5), dtype=np.float64)
    for i, r in enumerate(rects):
        if not isinstance(r, RotatedRect):
            raise InvalidRectError(f"{name}[{i}]: expected RotatedRect, got {type(r).__name__}")
        out[i, 0] = r.x
        out[i, 1] = r.y
        out[i, 2] = r.alpha
        out[i, 3] = r.h
        out[i, 4] = r.w
    return out


def iou_matrix(
    a: Sequence[RotatedRect],
    b: Sequence[RotatedRect],
    n: int = DEFAULT_GRID_N,
    mode: str = "fast",
) -> np.ndarray:
    """Pairwise IoU as a (len(a), len(b)) row-major array.

    mode="fast" uses the grid estimator (a[i] seeds the grid), mode="exact"
    the clipping oracle.  Entries are independent of evaluation order.
    """
    if mode not in ("fast", "exact"):
        raise InvalidParameterError(f"mode must be 'fast' or 'exact', got {mode!r}")
    pa = _pack(a, "a")
    pb = _pack(b, "b")
    if mode == "fast":
        _check_n(n)
        return impl.fast_iou_matrix(pa, pb, n)
    return impl.exact_iou_matrix(pa, pb)


def sample_rect_pairs(
    count: int,
    seed: int = 0,
    side_range: tuple[float, float] = (20.0, 200.0),
    max_center_gap: float = 100.0,
    center_range: tuple[float, float] = (0.0, 448.0),
) -> list[tuple[RotatedRect, RotatedRect]]:
    """Seeded random canonical rectangle pairs for estimator studies.

    The first center is uniform over center_range squared; the second sits
    a uniform-radius polar offset (at most max_center_gap) away.  Sides are
    uniform over side_range with the larger draw as h; angles are uniform
    over [0, pi).
    """
    if count < 0:
        raise InvalidParameterError(f"count must be >= 0, got {count}")
    rng = np.random.default_rng(seed)
    pairs = []
    for _ in range(count):
        x1 = rng.uniform(*center_range)
        y1 = rng.uniform(*center_range)
        gap = rng.uniform(0.0, max_center_gap)
        theta = rng.uniform(0.0, 2.0 * math.pi)
        x2 = x1 + gap * math.cos(theta)
        y2 = y1 + gap * math.sin(theta)
        rects = []
        for x, y in ((x1, y1), (x2, y2)):
            s = rng.uniform(*side_range, size=2)
            rects.append(RotatedRect(float(x), float(y), float(rng.uniform(0.0, math.pi)),
                                     float(max(s)), float(min(s))))
        pairs.append((rects[0], rects[1]))
    return pairs
