import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from rotbox.anchors import AnchorLabel, BoxDelta
from rotbox.errors import ConfigError, InvalidParameterError
from rotbox.losses import (
    BACKGROUND,
    BUILDING,
    AnchorPrediction,
    LossConfig,
    cross_entropy,
    smooth_l1,
    total_loss,
)

ZERO = BoxDelta(0, 0, 0, 0, 0)


def delta(*vals):
    return BoxDelta(*vals)


class TestCrossEntropy:
    def test_perfect_prediction(self):
        assert cross_entropy(AnchorPrediction((0.0, 1.0)), BUILDING) == 0.0
        assert cross_entropy(AnchorPrediction((1.0, 0.0)), BACKGROUND) == 0.0

    def test_uniform_prediction(self):
        p = AnchorPrediction((0.5, 0.5))
        assert cross_entropy(p, BUILDING) == pytest.approx(math.log(2), rel=1e-15)
        assert cross_entropy(p, BACKGROUND) == pytest.approx(math.log(2), rel=1e-15)

    def test_floor_engages_at_zero(self):
        v = cross_entropy(AnchorPrediction((1.0, 0.0)), BUILDING)
        assert v == -math.log(1e-12)
        assert v == pytest.approx(27.631021, abs=1e-5)

    def test_rejects_bad_probabilities(self):
        for probs in [(0.7, 0.7), (-0.1, 1.1), (math.nan, 1.0), (1.0,)]:
            with pytest.raises(InvalidParameterError):
                AnchorPrediction(probs)

    def test_rejects_bad_label(self):
        with pytest.raises(InvalidParameterError):
            cross_entropy(AnchorPrediction((0.5, 0.5)), 2)


class TestSmoothL1:
    def test_zero_residual(self):
        d = delta(0.3, -0.1, 0.9, 0.2, -0.5)
        assert smooth_l1(d, d) == 0.0

    def test_quadratic_branch(self):
        assert smooth_l1(delta(0.5, 0, 0, 0, 0), ZERO) == pytest.approx(0.125, abs=1e-15)

    def test_linear_branch(self):
        assert smooth_l1(delta(2.0, 0, 0, 0, 0), ZERO) == pytest.approx(1.5, abs=1e-15)

    def test_weights_scale_terms(self):
        d = delta(2.0, 0.5, 0, 0, 0)
        assert smooth_l1(d, ZERO, weights=(2, 4, 1, 1, 1)) == pytest.approx(
            2 * 1.5 + 4 * 0.125, abs=1e-12
        )

    def test_weight_length_checked(self):
        with pytest.raises(InvalidParameterError):
            smooth_l1(ZERO, ZERO, weights=(1, 1))

    def test_value_continuity_at_branch_point(self):
        eps = 1e-6
        inner = 0.5 * (1 - eps) ** 2
        outer = (1 + eps) - 0.5
        assert abs(inner - outer) < 3 * eps

    def test_derivative_continuity_at_branch_point(self):
        def l1(x):
            return smooth_l1(delta(x, 0, 0, 0, 0), ZERO)

        step = 1e-6
        slopes = []
        for x0 in (1 - 1e-4, 1 + 1e-4):
            slopes.append((l1(x0 + step) - l1(x0 - step)) / (2 * step))
        assert abs(slopes[0] - slopes[1]) < 1e-3
        assert slopes[0] == pytest.approx(1.0, abs=2e-4)

    @settings(max_examples=100, deadline=None)
    @given(st.lists(st.floats(-5, 5), min_size=10, max_size=10))
    def test_symmetric_and_nonnegative(self, vals):
        a = delta(*vals[:5])
        b = delta(*vals[5:])
        w = (1.0, 0.5, 2.0, 1.0, 0.0)
        assert smooth_l1(a, b, w) == smooth_l1(b, a, w)
        assert smooth_l1(a, b, w) >= 0.0

    def test_gradient_matches_finite_differences(self):
        rng = np.random.default_rng(17)
        w = (1.0, 2.0, 0.5, 1.5, 3.0)
        for _ in range(50):
            # residuals drawn away from the |r| = 1 seams
            inner = rng.uniform(-0.9, 0.9, 5)
            outer = rng.uniform(1.1, 3.0, 5) * np.where(rng.random(5) < 0.5, -1.0, 1.0)
            residual = np.where(rng.random(5) < 0.5, inner, outer)
            pred = rng.uniform(-2, 2, 5)
            target = pred - residual
            residual = pred - target
            analytic = [
                w[k] * (residual[k] if abs(residual[k]) < 1 else math.copysign(1, residual[k]))
                for k in range(5)
            ]
            step = 1e-5
            for k in range(5):
                up = pred.copy()
                up[k] += step
                dn = pred.copy()
                dn[k] -= step
                numeric = (
                    smooth_l1(delta(*up), delta(*target), w)
                    - smooth_l1(delta(*dn), delta(*target), w)
                ) / (2 * step)
                assert numeric == pytest.approx(analytic[k], abs=1e-6)


class TestTotalLoss:
    def test_all_ignored_is_zero(self):
        preds = [AnchorPrediction((0.5, 0.5))] * 3
        labels = [AnchorLabel.ignored()] * 3
        assert total_loss(preds, labels, {}) == (0.0, 0.0, 0.0)

    def test_single_negative_anchor(self):
        preds = [AnchorPrediction((0.5, 0.5))]
        labels = [AnchorLabel.negative()]
        cfg = LossConfig(lam=7.0, n_cls=1)
        total, cls_term, reg_term = total_loss(preds, labels, {}, cfg)
        assert cls_term == pytest.approx(math.log(2), rel=1e-15)
        assert reg_term == 0.0
        assert total == cls_term

    def test_perfect_positive(self):
        preds = [AnchorPrediction((0.0, 1.0), delta=ZERO)]
        labels = [AnchorLabel.positive(0)]
        assert total_loss(preds, labels, {0: ZERO}) == (0.0, 0.0, 0.0)

    def test_decomposition_and_normalizers(self):
        preds = [
            AnchorPrediction((0.5, 0.5), delta=delta(0.5, 0, 0, 0, 0)),
            AnchorPrediction((0.5, 0.5)),
            AnchorPrediction((0.9, 0.1)),
        ]
        labels = [AnchorLabel.positive(0), AnchorLabel.negative(), AnchorLabel.ignored()]
        targets = {0: ZERO}
        total, cls_term, reg_term = total_loss(preds, labels, targets, LossConfig(lam=2.0))
        # N_cls = 2 scored anchors, N_reg = 1 positive
        assert cls_term == pytest.approx(2 * math.log(2) / 2, rel=1e-12)
        assert reg_term == pytest.approx(0.125, rel=1e-12)
        assert total == pytest.approx(cls_term + 2.0 * reg_term, rel=1e-12)

    def test_missing_target_rejected(self):
        preds = [AnchorPrediction((0.0, 1.0), delta=ZERO)]
        labels = [AnchorLabel.positive(0)]
        with pytest.raises(InvalidParameterError, match="target"):
            total_loss(preds, labels, {})

    def test_missing_predicted_delta_rejected(self):
        preds = [AnchorPrediction((0.0, 1.0))]
        labels = [AnchorLabel.positive(0)]
        with pytest.raises(InvalidParameterError, match="delta"):
            total_loss(preds, labels, {0: ZERO})

    def test_misaligned_inputs_rejected(self):
        with pytest.raises(InvalidParameterError):
            total_loss([AnchorPrediction((0.5, 0.5))], [], {})

    def test_nonnegative_terms(self):
        rng = np.random.default_rng(19)
        for _ in range(20):
            preds, labels, targets = [], [], {}
            for i in range(8):
                p = float(rng.uniform(0, 1))
                preds.append(AnchorPrediction((p, 1 - p), delta=delta(*rng.uniform(-2, 2, 5))))
                kind = rng.integers(0, 3)
                if kind == 0:
                    labels.append(AnchorLabel.positive(0))
                    targets[i] = delta(*rng.uniform(-2, 2, 5))
                elif kind == 1:
                    labels.append(AnchorLabel.negative())
                else:
                    labels.append(AnchorLabel.ignored())
            total, cls_term, reg_term = total_loss(preds, labels, targets)
            assert total >= 0 and cls_term >= 0 and reg_term >= 0

    def test_monotone_in_lambda(self):
        preds = [AnchorPrediction((0.2, 0.8), delta=delta(1.0, 0, 0, 0, 0))]
        labels = [AnchorLabel.positive(0)]
        targets = {0: ZERO}
        totals = [
            total_loss(preds, labels, targets, LossConfig(lam=lam))[0]
            for lam in (0.0, 0.5, 1.0, 2.0, 10.0)
        ]
        assert all(a <= b for a, b in zip(totals, totals[1:]))

    def test_config_validation(self):
        with pytest.raises(ConfigError):
            LossConfig(lam=-1.0)
        with pytest.raises(ConfigError):
            LossConfig(weights=(1, 1, 1))
        with pytest.raises(ConfigError):
            LossConfig(n_cls=0)
