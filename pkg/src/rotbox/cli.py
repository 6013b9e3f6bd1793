"""Command-line front end.

Subcommands:

    iou       IoU of two rectangles (fast estimate or exact)
    anchors   dump the anchor field of a config file
    nms       filter a detection file with rotated NMS
    eval      AP of a detection file against annotations
    converge  fast-vs-exact error table across grid sizes

Exit codes: 0 success, 1 usage or argument parse error, 2 data or
semantic error (bad files, mismatched ids, invalid configs).
"""

from __future__ import annotations

import argparse
import math
import sys
from pathlib import Path

import numpy as np

from rotbox import __version__
from rotbox.anchors import generate_anchors
from rotbox.errors import RotBoxError
from rotbox.evaluate import pr_curve
from rotbox.fileio import (
    parse_anchor_config,
    parse_annotations,
    parse_detections,
    serialize_detections,
)
from rotbox.geometry import (
    DEFAULT_GRID_N,
    EVAL_GRID_N,
    canonicalize,
    exact_iou,
    fast_iou,
    sample_rect_pairs,
)
from rotbox.postprocess import nms

__all__ = ["build_parser", "main", "entrypoint"]

EXIT_OK = 0
EXIT_USAGE = 1
EXIT_DATA = 2


class _Parser(argparse.ArgumentParser):
    """argparse exits with 2 on usage errors; this CLI reserves 2 for data
    errors, so usage problems exit 1 instead."""

    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_USAGE, f"{self.prog}: error: {message}\n")


def _parse_rect(text: str, degrees: bool):
    parts = text.split(",")
    if len(parts) != 5:
        raise RotBoxError(f"expected x,y,alpha,h,w - got {text!r}")
    try:
        x, y, a, h, w = (float(p) for p in parts)
    except ValueError:
        raise RotBoxError(f"not numeric: {text!r}") from None
    if degrees:
        a = math.radians(a)
    return canonicalize(x, y, a, h, w)


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="rotbox", description="Oriented bounding-box toolkit")
    parser.add_argument("--version", action="version", version=f"rotbox {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("iou", parents=[], description="IoU of two rectangles")
    p.add_argument("rect1", help="x,y,alpha,h,w")
    p.add_argument("rect2", help="x,y,alpha,h,w")
    p.add_argument("--n", type=int, default=EVAL_GRID_N, help="grid side for the estimate")
    p.add_argument("--exact", action="store_true", help="use the exact clipping oracle")
    p.add_argument("--degrees", action="store_true", help="angles are degrees")
    p.set_defaults(func=cmd_iou)

    p = sub.add_parser("anchors", description="dump the anchor field of a config")
    p.add_argument("config", type=Path, help="anchor config file")
    p.add_argument("--out", type=Path, default=None, help="output file (default stdout)")
    p.add_argument("--degrees", action="store_true", help="config angles are degrees")
    p.set_defaults(func=cmd_anchors)

    p = sub.add_parser("nms", description="suppress overlapping detections per image")
    p.add_argument("detections", type=Path, help="detection file")
    p.add_argument("--thresh", type=float, default=0.5, help="suppression IoU threshold")
    p.add_argument("--n", type=int, default=DEFAULT_GRID_N, help="grid side for the estimate")
    p.add_argument("--out", type=Path, default=None, help="output file (default stdout)")
    p.add_argument("--degrees", action="store_true", help="file angles are degrees")
    p.set_defaults(func=cmd_nms)

    p = sub.add_parser("eval", description="AP of detections against annotations")
    p.add_argument("annotations", type=Path, help="annotation file")
    p.add_argument("detections", type=Path, help="detection file")
    p.add_argument("--iou-cut", type=float, default=0.5, help="true-positive IoU cut")
    p.add_argument("--curve-out", type=Path, default=None, help="write recall,precision CSV")
    p.add_argument("--degrees", action="store_true", help="file angles are degrees")
    p.add_argument("--fast", action="store_true",
                   help="match with the grid estimator instead of exact IoU")
    p.add_argument("--n", type=int, default=EVAL_GRID_N,
                   help="grid side for --fast matching")
    p.set_defaults(func=cmd_eval)

    p = sub.add_parser("converge", description="fast-vs-exact error across grid sizes")
    p.add_argument("--trials", type=int, default=1000, help="random pairs per grid size")
    p.add_argument("--n-list", default="16,32,64,128", help="comma-separated grid sides")
    p.add_argument("--seed", type=int, default=0, help="pair-sampling seed")
    p.set_defaults(func=cmd_converge)
    return parser


def cmd_iou(args) -> int:
    r1 = _parse_rect(args.rect1, args.degrees)
    r2 = _parse_rect(args.rect2, args.degrees)
    if args.exact:
        value = exact_iou(r1, r2)
    else:
        value = fast_iou(r1, r2, n=args.n)
    print(f"{value:.6f}")
    return EXIT_OK


def cmd_anchors(args) -> int:
    cfg = parse_anchor_config(args.config.read_text(encoding="utf-8"), degrees=args.degrees)
    lines = [",".join(repr(v) for v in r.astuple()) for r in generate_anchors(cfg)]
    body = "\n".join(lines) + "\n" if lines else ""
    if args.out is None:
        sys.stdout.write(body)
    else:
        args.out.write_text(body, encoding="utf-8")
    return EXIT_OK


def cmd_nms(args) -> int:
    images = parse_detections(args.detections.read_text(encoding="utf-8"), degrees=args.degrees)
    filtered = {image_id: nms(dets, args.thresh, n=args.n) for image_id, dets in images.items()}
    body = serialize_detections(filtered)
    if args.out is None:
        sys.stdout.write(body)
    else:
        args.out.write_text(body, encoding="utf-8")
    return EXIT_OK


def cmd_eval(args) -> int:
    gts = parse_annotations(args.annotations.read_text(encoding="utf-8"), degrees=args.degrees)
    dets = parse_detections(args.detections.read_text(encoding="utf-8"), degrees=args.degrees)
    orphans = sorted(set(dets) - set(gts))
    if orphans:
        raise RotBoxError(
            "detection image ids missing from annotations: " + ", ".join(orphans)
        )
    samples = [(dets.get(image_id, []), gts[image_id]) for image_id in gts]
    mode = "fast" if args.fast else "exact"
    curve = pr_curve(samples, iou_cut=args.iou_cut, mode=mode, n=args.n)
    if args.curve_out is not None:
        rows = [f"{repr(r)},{repr(p)}" for r, p in curve.points]
        args.curve_out.write_text("recall,precision\n" + "\n".join(rows) + "\n", encoding="utf-8")
    print(f"AP = {curve.ap:.6f}")
    return EXIT_OK


def cmd_converge(args) -> int:
    try:
        n_list = [int(p) for p in args.n_list.split(",")]
    except ValueError:
        raise RotBoxError(f"--n-list must be comma-separated integers, got {args.n_list!r}") from None
    deduped = list(dict.fromkeys(n_list))
    print("n,mean_abs_err,max_abs_err")
    if args.trials < 1:
        return EXIT_OK
    pairs = sample_rect_pairs(args.trials, seed=args.seed)
    exact = np.array([exact_iou(a, b) for a, b in pairs])
    for n in deduped:
        err = np.abs(np.array([fast_iou(a, b, n=n) for a, b in pairs]) - exact)
        print(f"{n},{err.mean():.6f},{err.max():.6f}")
    return EXIT_OK


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    try:
        return args.func(args)
    except RotBoxError as exc:
        kind = "parse error" if args.command == "iou" else "error"
        print(f"rotbox {args.command}: {kind}: {exc}", file=sys.stderr)
        return EXIT_USAGE if args.command == "iou" else EXIT_DATA
    except OSError as exc:
        print(f"rotbox {args.command}: {exc}", file=sys.stderr)
        return EXIT_DATA


def entrypoint() -> None:
    sys.exit(main())


if __name__ == "__main__":
    entrypoint()
