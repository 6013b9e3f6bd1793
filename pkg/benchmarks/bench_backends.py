"""Compare the compiled and pure-Python kernel backends on the hot paths.

Usage:
    python benchmarks/bench_backends.py [--pairs 200] [--n 32] [--boxes 400]

Times the pairwise IoU matrices (fast and exact) and NMS on identical
inputs, checks the outputs agree bitwise, and prints the speedups.
"""

from __future__ import annotations

import argparse
import math
import time

import numpy as np

from rotbox._kernels import fallback

try:
    from rotbox._kernels import _native as native
except ImportError:
    native = None


def make_boxes(count: int, seed: int, spread: float = 400.0) -> np.ndarray:
    rng = np.random.default_rng(seed)
    out = np.empty((count, 5), dtype=np.float64)
    for i in range(count):
        s = sorted(rng.uniform(20, 200, 2))
        out[i] = (*rng.uniform(0, spread, 2), rng.uniform(0, math.pi), s[1], s[0])
    return out


def bench(label, fn_native, fn_python, check=np.array_equal):
    t0 = time.perf_counter()
    ref = fn_python()
    t_py = time.perf_counter() - t0
    if native is None:
        print(f"{label:<28} python {t_py * 1e3:9.1f} ms   (no compiled backend)")
        return
    t0 = time.perf_counter()
    got = fn_native()
    t_nat = time.perf_counter() - t0
    agree = "bitwise-equal" if check(ref, got) else "MISMATCH"
    print(f"{label:<28} python {t_py * 1e3:9.1f} ms   native {t_nat * 1e3:8.2f} ms"
          f"   x{t_py / t_nat:7.1f}   {agree}")


def main() -> None:
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--pairs", type=int, default=200, help="boxes per side of the IoU matrix")
    ap.add_argument("--n", type=int, default=32, help="grid side for the fast estimator")
    ap.add_argument("--boxes", type=int, default=400, help="detections for the NMS run")
    args = ap.parse_args()

    a = make_boxes(args.pairs, seed=1)
    b = make_boxes(args.pairs, seed=2)
    nms_boxes = make_boxes(args.boxes, seed=3, spread=800.0)

    print(f"inputs: {args.pairs}x{args.pairs} IoU matrices (grid n={args.n}), "
          f"{args.boxes}-box NMS")
    bench(
        f"fast_iou_matrix (n={args.n})",
        lambda: native.fast_iou_matrix(a, b, args.n),
        lambda: fallback.fast_iou_matrix(a, b, args.n),
    )
    bench(
        "exact_iou_matrix",
        lambda: native.exact_iou_matrix(a, b),
        lambda: fallback.exact_iou_matrix(a, b),
    )
    bench(
        f"nms_keep (n={args.n})",
        lambda: native.nms_keep(nms_boxes, 0.3, args.n),
        lambda: fallback.nms_keep(nms_boxes, 0.3, args.n),
    )


if __name__ == "__main__":
    main()
