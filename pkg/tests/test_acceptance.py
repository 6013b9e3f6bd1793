"""Acceptance gate: one test per release criterion, each at its stated
tolerance, printing a pass line when it holds.  Run with `pytest -v` (or
`-s` to see the lines) as the final check before shipping."""

import math
import time

import numpy as np
import pytest

from _oracles import aabb_iou, brute_force_ap, random_axis_aligned_pairs
from rotbox.anchors import (
    AnchorGridConfig,
    AnchorLabel,
    BoxDelta,
    decode,
    encode,
    generate_anchors,
)
from rotbox.cli import main
from rotbox.evaluate import pr_curve
from rotbox.geometry import (
    RotatedRect,
    exact_iou,
    fast_iou,
    sample_rect_pairs,
)
from rotbox.losses import AnchorPrediction, LossConfig, smooth_l1, total_loss
from rotbox.postprocess import Detection, nms

DEG = math.pi / 180


def _ok(name):
    print(f"[PASS] {name}")


def test_c1_fast_iou_convergence():
    pairs = sample_rect_pairs(1000, seed=2024)
    start = time.perf_counter()
    exact = np.array([exact_iou(a, b) for a, b in pairs])
    means = []
    maxes = []
    for n in (16, 32, 64, 128):
        fast = np.array([fast_iou(a, b, n) for a, b in pairs])
        err = np.abs(fast - exact)
        means.append(err.mean())
        maxes.append(err.max())
    elapsed = time.perf_counter() - start
    assert all(m2 <= m1 for m1, m2 in zip(means, means[1:])), means
    assert means[-1] < 0.01, means
    assert maxes[-1] < 0.05, maxes
    assert elapsed < 30.0, f"took {elapsed:.1f}s"
    _ok(f"C1 fast-IoU convergence: mean@128={means[-1]:.5f}, "
        f"max@128={maxes[-1]:.5f}, {elapsed:.2f}s")


def test_c2_closed_form_geometry():
    sq = RotatedRect(0, 0, 0, 1, 1)
    sq45 = RotatedRect(0, 0, math.pi / 4, 1, 1)
    target = 1 / math.sqrt(2)
    assert abs(exact_iou(sq, sq45) - target) <= 1e-9
    assert abs(fast_iou(sq, sq45, 64) - target) <= 0.02
    for a, b in random_axis_aligned_pairs(1000, seed=77):
        assert abs(exact_iou(a, b) - aabb_iou(a, b)) <= 1e-12
    _ok("C2 closed-form geometry: octagon 1e-9, fast@64 0.02, AABB 1e-12 x1000")


def test_c3_delta_round_trip_and_invariance():
    rng = np.random.default_rng(2025)
    for _ in range(1000):
        aa = float(rng.uniform(0, math.pi))
        while True:
            ag = aa + float(rng.uniform(-math.pi / 2, math.pi / 2))
            if 0 <= ag < math.pi:
                break
        sa, sg = rng.uniform(20, 200, 2), rng.uniform(20, 200, 2)
        a = RotatedRect(*rng.uniform(0, 448, 2), aa, max(sa), min(sa))
        g = RotatedRect(*rng.uniform(0, 448, 2), ag, max(sg), min(sg))
        assert exact_iou(decode(a, encode(a, g)), g) >= 1 - 1e-9
        d = encode(a, g)
        dx, dy = rng.uniform(-300, 300, 2)
        shifted = encode(
            RotatedRect(a.x + dx, a.y + dy, a.alpha, a.h, a.w),
            RotatedRect(g.x + dx, g.y + dy, g.alpha, g.h, g.w),
        )
        s = float(rng.uniform(0.2, 5.0))
        scaled = encode(
            RotatedRect(s * a.x, s * a.y, a.alpha, s * a.h, s * a.w),
            RotatedRect(s * g.x, s * g.y, g.alpha, s * g.h, s * g.w),
        )
        for got, want in zip(shifted.astuple(), d.astuple()):
            assert abs(got - want) <= 1e-12
        for got, want in zip(scaled.astuple(), d.astuple()):
            assert abs(got - want) <= 1e-12
    _ok("C3 delta round trip 1e-9 and shift/scale invariance 1e-12, x1000")


def test_c4_loss_checks():
    zero = BoxDelta(0, 0, 0, 0, 0)
    eps = 1e-6
    assert abs(0.5 * (1 - eps) ** 2 - ((1 + eps) - 0.5)) < 3 * eps

    def l1(x):
        return smooth_l1(BoxDelta(x, 0, 0, 0, 0), zero)

    step = 1e-6
    left = (l1(1 - 1e-4 + step) - l1(1 - 1e-4 - step)) / (2 * step)
    right = (l1(1 + 1e-4 + step) - l1(1 + 1e-4 - step)) / (2 * step)
    assert abs(left - right) < 1e-3

    rng = np.random.default_rng(11)
    w = (1.0, 2.0, 0.5, 1.5, 3.0)
    for _ in range(100):
        inner = rng.uniform(-0.9, 0.9, 5)
        outer = rng.uniform(1.1, 3.0, 5) * np.where(rng.random(5) < 0.5, -1.0, 1.0)
        residual = np.where(rng.random(5) < 0.5, inner, outer)
        pred = rng.uniform(-2, 2, 5)
        target = pred - residual
        for k in range(5):
            up, dn = pred.copy(), pred.copy()
            up[k] += 1e-5
            dn[k] -= 1e-5
            numeric = (smooth_l1(BoxDelta(*up), BoxDelta(*target), w)
                       - smooth_l1(BoxDelta(*dn), BoxDelta(*target), w)) / 2e-5
            r = pred[k] - target[k]
            analytic = w[k] * (r if abs(r) < 1 else math.copysign(1.0, r))
            assert abs(numeric - analytic) <= 1e-6

    # combined-objective fixtures reproduce hand-computed values exactly
    assert total_loss([AnchorPrediction((0.5, 0.5))] * 2,
                      [AnchorLabel.ignored()] * 2, {}) == (0.0, 0.0, 0.0)
    total, cls_term, reg_term = total_loss(
        [AnchorPrediction((0.5, 0.5))], [AnchorLabel.negative()], {}, LossConfig(n_cls=1)
    )
    assert (total, cls_term, reg_term) == (math.log(2), math.log(2), 0.0)
    assert total_loss([AnchorPrediction((0.0, 1.0), delta=zero)],
                      [AnchorLabel.positive(0)], {0: zero}) == (0.0, 0.0, 0.0)
    _ok("C4 loss continuity/gradient/decomposition checks")


def test_c5_nms_suite():
    rng = np.random.default_rng(33)
    for _ in range(10):
        dets = []
        for _ in range(50):
            s = sorted(rng.uniform(20, 80, 2))
            rect = RotatedRect(*rng.uniform(0, 140, 2), rng.uniform(0, math.pi), s[1], s[0])
            dets.append(Detection(rect, float(rng.uniform(0, 1))))
        kept = nms(dets, 0.4, n=32)
        assert len(kept) <= len(dets) and all(d in dets for d in kept)
        assert max(dets, key=lambda d: d.score) in kept
        for i in range(len(kept)):
            for j in range(i + 1, len(kept)):
                assert fast_iou(kept[i].rect, kept[j].rect, 32) <= 0.4
        assert nms(kept, 0.4, n=32) == kept
        assert nms(dets, 0.4, n=32) == kept

    three = [
        Detection(RotatedRect(0, 0, 0, 10, 10), 0.9),
        Detection(RotatedRect(5, 0, 0, 10, 10), 0.8),
        Detection(RotatedRect(10, 0, 0, 10, 10), 0.7),
    ]
    survivors = nms(three, 0.3)
    assert len(survivors) == 2
    assert [d.rect.x for d in survivors] == [0.0, 10.0]
    _ok("C5 NMS invariants x10 random sets; three-square case -> 2 survivors")


def test_c6_ap_oracle():
    def sq(x, y=0.0):
        return RotatedRect(x, y, 0.0, 10.0, 10.0)

    g = sq(0)
    perfect = [([Detection(g, 0.9)], [g]), ([Detection(sq(100), 0.7)], [sq(100)])]
    assert pr_curve(perfect).ap == 1.0

    hand = [([Detection(g, 0.9), Detection(sq(600), 0.8)], [g, sq(300)])]
    assert pr_curve(hand).ap == 0.5

    rng = np.random.default_rng(44)
    checked = 0
    for _ in range(12):
        samples = []
        for _ in range(int(rng.integers(1, 3))):
            dets = []
            for _ in range(int(rng.integers(0, 4))):
                s = rng.uniform(15, 40, 2)
                rect = RotatedRect(*rng.uniform(0, 40, 2), rng.uniform(0, math.pi),
                                   max(s), min(s))
                dets.append(Detection(rect, float(rng.uniform(0, 1))))
            gts = []
            for _ in range(int(rng.integers(1, 4))):
                s = rng.uniform(15, 40, 2)
                gts.append(RotatedRect(*rng.uniform(0, 40, 2), rng.uniform(0, math.pi),
                                       max(s), min(s)))
            samples.append((dets, gts))
        n_det = sum(len(d) for d, _ in samples)
        n_gt = sum(len(g_) for _, g_ in samples)
        if n_det > 6 or n_gt > 3 or n_det == 0:
            continue
        checked += 1
        assert pr_curve(samples).ap == pytest.approx(brute_force_ap(samples, 0.5), abs=1e-12)
    assert checked >= 5
    _ok(f"C6 AP oracle: perfect=1.0, hand=0.5, brute-force equality x{checked}")


def test_c7_anchor_law():
    cfg = AnchorGridConfig(
        feat_width=28, feat_height=28, stride=16,
        scales=(60.0**2, 90.0**2, 130.0**2),
        angles=(-60 * DEG, 0.0, 60 * DEG),
    )
    anchors = generate_anchors(cfg)
    assert len(anchors) == 7056
    scales = np.tile(np.repeat([3600.0, 8100.0, 16900.0], 3), 28 * 28)
    areas = np.array([a.area for a in anchors])
    assert np.abs(areas / scales - 1).max() <= 1e-6
    for a in anchors:
        assert a.h >= a.w and 0 <= a.alpha < math.pi
    _ok("C7 anchor law: 28x28 AG grid -> 7056 canonical anchors, areas 1e-6")


def test_c8_cli_examples(tmp_path, capsys):
    def run(*argv):
        code = main(list(argv))
        cap = capsys.readouterr()
        return code, cap.out, cap.err

    assert run("iou", "0,0,0,10,10", "0,0,0,10,10") == (0, "1.000000\n", "")
    code, out, _ = run("iou", "--exact", "0,0,0,1,1", "0,0,45,1,1", "--degrees")
    assert (code, out) == (0, "0.707107\n")
    code, _, err = run("iou", "a,b,c,d,e", "0,0,0,1,1")
    assert code == 1 and err != ""

    cfg = tmp_path / "one.cfg"
    cfg.write_text("feat_width = 1\nfeat_height = 1\nstride = 16\nscales = 4096\nangles = 0\n")
    assert run("anchors", str(cfg)) == (0, "8.0,8.0,0.0,64.0,64.0\n", "")
    ag = tmp_path / "ag.cfg"
    ag.write_text("feat_width = 28\nfeat_height = 28\nstride = 16\n"
                  "scales = 3600,8100,16900\nangles = -60,0,60\n")
    code, out, _ = run("anchors", str(ag), "--degrees")
    assert code == 0 and len(out.splitlines()) == 7056
    bad = tmp_path / "bad.cfg"
    bad.write_text("feat_width = 1\nfeat_height = 1\nstride = 16\nangles = 0\n")
    assert run("anchors", str(bad))[0] == 2

    dets = tmp_path / "dets.txt"
    dets.write_text("# image a\n0.0,0.0,0.0,10.0,6.0,0.9\n0.0,0.0,0.0,10.0,6.0,0.8\n")
    code, out, _ = run("nms", str(dets))
    assert code == 0 and len(out.splitlines()) == 2
    dets.write_text("# image a\n0.0,0.0,0.0,10.0,6.0,0.7\n500.0,0.0,0.0,10.0,6.0,0.9\n")
    code, out, _ = run("nms", str(dets))
    assert code == 0 and len(out.splitlines()) == 3
    dets.write_text("# image a\n0.0,0.0,0.0,10.0,10.0,0.9\n"
                    "5.0,0.0,0.0,10.0,10.0,0.8\n10.0,0.0,0.0,10.0,10.0,0.7\n")
    code, out, _ = run("nms", str(dets), "--thresh", "0.3")
    assert code == 0 and len(out.splitlines()) == 3

    ann = tmp_path / "ann.txt"
    ann.write_text("# image a\n0.0,0.0,0.0,10.0,10.0\n")
    good = tmp_path / "good.txt"
    good.write_text("# image a\n0.0,0.0,0.0,10.0,10.0,0.9\n")
    assert run("eval", str(ann), str(good)) == (0, "AP = 1.000000\n", "")
    ann.write_text("# image a\n0.0,0.0,0.0,10.0,10.0\n300.0,0.0,0.0,10.0,10.0\n")
    good.write_text("# image a\n0.0,0.0,0.0,10.0,10.0,0.9\n600.0,0.0,0.0,10.0,10.0,0.8\n")
    assert run("eval", str(ann), str(good)) == (0, "AP = 0.500000\n", "")
    empty = tmp_path / "empty.txt"
    empty.write_text("")
    assert run("eval", str(empty), str(good))[0] == 2

    code, out, _ = run("converge", "--trials", "0")
    assert (code, out) == (0, "n,mean_abs_err,max_abs_err\n")
    code, out, _ = run("converge", "--trials", "200", "--n-list", "128,128")
    lines = out.splitlines()
    assert code == 0 and len(lines) == 2
    assert float(lines[1].split(",")[1]) < 0.01
    _ok("C8 CLI examples byte-for-byte with stated exit codes")
