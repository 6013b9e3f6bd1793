"""Multiangle anchor fields, box-delta coding, label assignment, sampling.

Anchors live on a feature-map lattice: one anchor per (cell, scale, angle)
triple, centered at ((col + 0.5) * stride, (row + 0.5) * stride).  Scales
are areas in px^2; each anchor solves h * w = scale with h / w = aspect.

The delta coding normalizes the center offset by the crossed anchor side
(x by w_a, y by h_a), takes log side ratios, and keeps the raw angle
difference:

    tx = (x - x_a) / w_a      ty = (y - y_a) / h_a
    th = log(h / h_a)         tw = log(w / w_a)
    talpha = alpha - alpha_a

All five components depend only on local geometry, never on image size.
The angle difference is deliberately left unnormalized: both angles are
canonical in [0, pi), so targets straddling the 0/pi seam produce large
talpha values rather than wrapping.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Sequence

import numpy as np

from rotbox._kernels import impl
from rotbox.errors import ConfigError, InvalidDeltaError, InvalidParameterError
from rotbox.geometry import DEFAULT_GRID_N, RotatedRect, iou_matrix

__all__ = [
    "AnchorGridConfig",
    "BoxDelta",
    "AnchorLabel",
    "generate_anchors",
    "encode",
    "decode",
    "assign_labels",
    "sample_batch",
]


def _angle_mod_pi(a: float) -> float:
    return impl.angle_mod_pi(float(a))


@dataclass(frozen=True)
class AnchorGridConfig:
    """Anchor field over a feat_width x feat_height map with the given stride.

    scales are anchor areas (px^2); angles are orientations in radians and
    are reduced into [0, pi) on construction; aspect is the h:w side ratio
    (>= 1 since h is the long side).
    """

    feat_width: int
    feat_height: int
    stride: float
    scales: tuple[float, ...]
    angles: tuple[float, ...]
    aspect: float = 1.0

    def __post_init__(self):
        if not isinstance(self.feat_width, int) or self.feat_width < 1:
            raise ConfigError(f"feat_width must be a positive integer, got {self.feat_width!r}")
        if not isinstance(self.feat_height, int) or self.feat_height < 1:
            raise ConfigError(f"feat_height must be a positive integer, got {self.feat_height!r}")
        if not math.isfinite(self.stride) or self.stride < 1:
            raise ConfigError(f"stride must be >= 1, got {self.stride!r}")
        object.__setattr__(self, "stride", float(self.stride))
        scales = tuple(float(s) for s in self.scales)
        if not scales or any(not math.isfinite(s) or s <= 0 for s in scales):
            raise ConfigError(f"scales must be nonempty positive areas, got {self.scales!r}")
        object.__setattr__(self, "scales", scales)
        if len(self.angles) == 0:
            raise ConfigError("angles must be nonempty")
        for a in self.angles:
            if not math.isfinite(a):
                raise ConfigError(f"angles must be finite, got {a!r}")
        object.__setattr__(self, "angles", tuple(_angle_mod_pi(a) for a in self.angles))
        if not math.isfinite(self.aspect) or self.aspect < 1.0:
            raise ConfigError(f"aspect is h:w with h the long side, must be >= 1, got {self.aspect!r}")
        object.__setattr__(self, "aspect", float(self.aspect))

    @property
    def anchors_per_cell(self) -> int:
        return len(self.scales) * len(self.angles)


@dataclass(frozen=True)
class BoxDelta:
    """Regression target (tx, ty, talpha, th, tw) relating a box to an anchor."""

    tx: float
    ty: float
    talpha: float
    th: float
    tw: float

    def __post_init__(self):
        for name in ("tx", "ty", "talpha", "th", "tw"):
            v = getattr(self, name)
            if not isinstance(v, (int, float)) or isinstance(v, bool) or not math.isfinite(v):
                raise InvalidDeltaError(f"{name} must be finite, got {v!r}")
            object.__setattr__(self, name, float(v))

    def astuple(self) -> tuple[float, float, float, float, float]:
        return (self.tx, self.ty, self.talpha, self.th, self.tw)


_POSITIVE = "positive"
_NEGATIVE = "negative"
_IGNORED = "ignored"


@dataclass(frozen=True)
class AnchorLabel:
    """Per-anchor training tag: positive (with matched gt index), negative, or ignored."""

    status: str
    gt_index: int | None = None

    def __post_init__(self):
        if self.status not in (_POSITIVE, _NEGATIVE, _IGNORED):
            raise InvalidParameterError(f"unknown label status {self.status!r}")
        if self.status == _POSITIVE and (self.gt_index is None or self.gt_index < 0):
            raise InvalidParameterError("positive label needs a ground-truth index")
        if self.status != _POSITIVE and self.gt_index is not None:
            raise InvalidParameterError(f"{self.status} label cannot carry a ground-truth index")

    @classmethod
    def positive(cls, gt_index: int) -> "AnchorLabel":
        return cls(_POSITIVE, gt_index)

    @classmethod
    def negative(cls) -> "AnchorLabel":
        return cls(_NEGATIVE)

    @classmethod
    def ignored(cls) -> "AnchorLabel":
        return cls(_IGNORED)

    @property
    def is_positive(self) -> bool:
        return self.status == _POSITIVE

    @property
    def is_negative(self) -> bool:
        return self.status == _NEGATIVE

    @property
    def is_ignored(self) -> bool:
        return self.status == _IGNORED


def generate_anchors(cfg: AnchorGridConfig) -> list[RotatedRect]:
    """All anchors of the field, ordered row-major, then by scale, then angle."""
    if not isinstance(cfg, AnchorGridConfig):
        raise ConfigError(f"expected AnchorGridConfig, got {type(cfg).__name__}")
    sides = []
    for s in cfg.scales:
        h = math.sqrt(s * cfg.aspect)
        w = math.sqrt(s / cfg.aspect)
        sides.append((h, w))
    out = []
    for row in range(cfg.feat_height):
        cy = (row + 0.5) * cfg.stride
        for col in range(cfg.feat_width):
            cx = (col + 0.5) * cfg.stride
            for h, w in sides:
                for a in cfg.angles:
                    out.append(RotatedRect(cx, cy, a, h, w))
    return out


def encode(anchor: RotatedRect, gt: RotatedRect) -> BoxDelta:
    """Offsets that move the anchor onto gt; exact inverse of decode."""
    t = impl.encode_one(anchor.x, anchor.y, anchor.alpha, anchor.h, anchor.w,
                        gt.x, gt.y, gt.alpha, gt.h, gt.w)
    return BoxDelta(*t)


def decode(anchor: RotatedRect, delta: BoxDelta) -> RotatedRect:
    """Apply delta to the anchor and canonicalize the result.

    Log side ratios beyond +-20 are rejected: a side ratio past e^20 can
    only come from corrupt regression output, and exp overflows soon after.
    """
    if not isinstance(delta, BoxDelta):
        raise InvalidDeltaError(f"expected BoxDelta, got {type(delta).__name__}")
    r = impl.decode_one(anchor.x, anchor.y, anchor.alpha, anchor.h, anchor.w,
                        delta.tx, delta.ty, delta.talpha, delta.th, delta.tw)
    if r is None:
        raise InvalidDeltaError(f"delta {delta.astuple()} does not decode to a valid rectangle")
    return RotatedRect(*r)


def assign_labels(
    anchors: Sequence[RotatedRect],
    gts: Sequence[RotatedRect],
    pos_thresh: float = 0.7,
    neg_thresh: float = 0.3,
    n: int = DEFAULT_GRID_N,
) -> list[AnchorLabel]:
    """Mark each anchor positive, negative, or ignored against the gt set.

    An anchor is positive when it attains some gt's best IoU among all
    anchors (ties included, zero-overlap gts excluded) or when its own best
    IoU reaches pos_thresh; negative when its best IoU is below neg_thresh
    and it is not positive; ignored otherwise.  Positives carry the index
    of their best-IoU gt.  IoU is the grid estimate seeded by the anchor.
    """
    if len(anchors) == 0:
        raise InvalidParameterError("cannot assign labels without anchors")
    if not 0.0 <= neg_thresh <= pos_thresh <= 1.0:
        raise InvalidParameterError(
            f"thresholds must satisfy 0 <= neg <= pos <= 1, got neg={neg_thresh}, pos={pos_thresh}"
        )
    if len(gts) == 0:
        return [AnchorLabel.negative() for _ in anchors]

    iou = iou_matrix(anchors, gts, n=n, mode="fast")
    best_gt = iou.argmax(axis=1)
    best_iou = iou[np.arange(len(anchors)), best_gt]

    pos_mask = best_iou >= pos_thresh
    col_max = iou.max(axis=0)
    for j in range(len(gts)):
        if col_max[j] > 0.0:
            pos_mask |= iou[:, j] == col_max[j]

    labels = []
    for i in range(len(anchors)):
        if pos_mask[i]:
            labels.append(AnchorLabel.positive(int(best_gt[i])))
        elif best_iou[i] < neg_thresh:
            labels.append(AnchorLabel.negative())
        else:
            labels.append(AnchorLabel.ignored())
    return labels


def sample_batch(
    labels: Sequence[AnchorLabel],
    batch_size: int = 128,
    pos_fraction: float = 0.5,
    seed: int = 0,
) -> list[int]:
    """Sample up to batch_size anchor indices for one training step.

    At most floor(pos_fraction * batch_size) positives are drawn; negatives
    fill the remainder (all of them when positives are scarce).  Ignored
    anchors are never sampled.  Deterministic for a fixed seed.
    """
    if batch_size < 2:
        raise InvalidParameterError(f"batch_size must be >= 2, got {batch_size}")
    if not 0.0 < pos_fraction < 1.0:
        raise InvalidParameterError(f"pos_fraction must be in (0, 1), got {pos_fraction}")
    pos = [i for i, lab in enumerate(labels) if lab.is_positive]
    neg = [i for i, lab in enumerate(labels) if lab.is_negative]
    if not pos and not neg:
        raise InvalidParameterError("no positive or negative anchors to sample")
    rng = np.random.default_rng(seed)
    n_pos = min(len(pos), int(pos_fraction * batch_size))
    n_neg = min(len(neg), batch_size - n_pos)
    chosen: list[int] = []
    if n_pos:
        chosen.extend(int(pos[k]) for k in rng.choice(len(pos), size=n_pos, replace=False))
    if n_neg:
        chosen.extend(int(neg[k]) for k in rng.choice(len(neg), size=n_neg, replace=False))
    return chosen
