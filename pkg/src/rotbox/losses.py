"""Detection loss: per-anchor cross-entropy plus weighted smooth-L1 on the
box deltas, combined as

    L = (1/N_cls) * sum_i CE(p_i, l_i) + lam * (1/N_reg) * sum_{pos} SL1(t_i, t*_i)

Only positive anchors contribute to the regression sum; ignored anchors
contribute to neither.  This module evaluates the objective on given
predictions; there is no training loop.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Mapping, Sequence

from rotbox.anchors import AnchorLabel, BoxDelta
from rotbox.errors import ConfigError, InvalidParameterError

__all__ = [
    "BACKGROUND",
    "BUILDING",
    "LossConfig",
    "AnchorPrediction",
    "cross_entropy",
    "smooth_l1",
    "total_loss",
]

BACKGROUND = 0
BUILDING = 1

PROB_FLOOR = 1e-12

_UNIT_WEIGHTS = (1.0, 1.0, 1.0, 1.0, 1.0)


@dataclass(frozen=True)
class LossConfig:
    """Objective knobs: lam balances regression against classification,
    weights scale the five delta dimensions (tx, ty, talpha, th, tw), and
    n_cls / n_reg normalize the two sums.  When left as None, n_cls falls
    back to the number of non-ignored anchors and n_reg to the number of
    positives (each floored at 1)."""

    lam: float = 1.0
    weights: tuple[float, float, float, float, float] = _UNIT_WEIGHTS
    n_cls: int | None = None
    n_reg: int | None = None

    def __post_init__(self):
        if not math.isfinite(self.lam) or self.lam < 0:
            raise ConfigError(f"lam must be >= 0, got {self.lam!r}")
        ws = tuple(float(w) for w in self.weights)
        if len(ws) != 5 or any(not math.isfinite(w) or w < 0 for w in ws):
            raise ConfigError(f"weights must be five nonnegative values, got {self.weights!r}")
        object.__setattr__(self, "weights", ws)
        for name in ("n_cls", "n_reg"):
            v = getattr(self, name)
            if v is not None and (not isinstance(v, int) or v < 1):
                raise ConfigError(f"{name} must be a positive integer or None, got {v!r}")


@dataclass(frozen=True)
class AnchorPrediction:
    """One anchor's output: class probabilities indexed by class id
    (probs[BACKGROUND], probs[BUILDING]) plus the predicted box delta.
    The delta may be omitted for anchors that never reach the regression
    term."""

    probs: tuple[float, float]
    delta: BoxDelta | None = None

    def __post_init__(self):
        p = self.probs
        if len(p) != 2:
            raise InvalidParameterError(f"expected two class probabilities, got {p!r}")
        p = (float(p[0]), float(p[1]))
        if any(not math.isfinite(v) or v < 0.0 for v in p):
            raise InvalidParameterError(f"probabilities must be finite and >= 0, got {p!r}")
        if abs(p[0] + p[1] - 1.0) > 1e-9:
            raise InvalidParameterError(f"probabilities must sum to 1, got {p!r}")
        object.__setattr__(self, "probs", p)


def cross_entropy(pred: AnchorPrediction, label: int) -> float:
    """-log of the probability assigned to the true class, floored at 1e-12."""
    if label not in (BACKGROUND, BUILDING):
        raise InvalidParameterError(f"label must be {BACKGROUND} or {BUILDING}, got {label!r}")
    if not isinstance(pred, AnchorPrediction):
        raise InvalidParameterError(f"expected AnchorPrediction, got {type(pred).__name__}")
    p = pred.probs[label]
    if p < PROB_FLOOR:
        p = PROB_FLOOR
    return -math.log(p)


def _l1(x: float) -> float:
    if abs(x) < 1.0:
        return 0.5 * x * x
    return abs(x) - 0.5


def smooth_l1(
    pred: BoxDelta,
    target: BoxDelta,
    weights: Sequence[float] = _UNIT_WEIGHTS,
) -> float:
    """Weighted smooth-L1 over the five delta residuals: quadratic inside
    the unit interval, linear outside, continuous at the seam."""
    if len(weights) != 5:
        raise InvalidParameterError(f"expected five weights, got {len(weights)}")
    pv = pred.astuple()
    tv = target.astuple()
    return sum(float(w) * _l1(a - b) for w, a, b in zip(weights, pv, tv))


def total_loss(
    preds: Sequence[AnchorPrediction],
    labels: Sequence[AnchorLabel],
    targets: Mapping[int, BoxDelta],
    cfg: LossConfig = LossConfig(),
) -> tuple[float, float, float]:
    """Evaluate the combined objective over one batch.

    targets maps anchor index -> ground-truth delta and must cover every
    positive anchor.  Returns (total, cls_term, reg_term) with
    total = cls_term + lam * reg_term.
    """
    if len(preds) != len(labels):
        raise InvalidParameterError(
            f"preds and labels must align, got {len(preds)} vs {len(labels)}"
        )
    cls_sum = 0.0
    reg_sum = 0.0
    n_scored = 0
    n_pos = 0
    for i, (pred, lab) in enumerate(zip(preds, labels)):
        if lab.is_ignored:
            continue
        n_scored += 1
        cls_sum += cross_entropy(pred, BUILDING if lab.is_positive else BACKGROUND)
        if lab.is_positive:
            n_pos += 1
            if i not in targets:
                raise InvalidParameterError(f"positive anchor {i} has no target delta")
            if pred.delta is None:
                raise InvalidParameterError(f"positive anchor {i} has no predicted delta")
            reg_sum += smooth_l1(pred.delta, targets[i], cfg.weights)
    n_cls = cfg.n_cls if cfg.n_cls is not None else max(1, n_scored)
    n_reg = cfg.n_reg if cfg.n_reg is not None else max(1, n_pos)
    cls_term = cls_sum / n_cls
    reg_term = reg_sum / n_reg
    return cls_term + cfg.lam * reg_term, cls_term, reg_term
