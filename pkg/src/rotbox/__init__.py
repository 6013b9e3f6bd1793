"""rotbox: oriented bounding-box machinery for detection pipelines.

Grid-sampled fast IoU with an exact clipping oracle, multiangle anchor
generation, box-delta coding, the detection loss stack, rotated NMS, and
PR-curve/AP evaluation.  Heavy kernels run on a compiled backend when the
extension is available and on a bit-identical pure-Python backend
otherwise; rotbox.backend_name says which one is active.
"""

from rotbox._kernels import backend_name
from rotbox.anchors import (
    AnchorGridConfig,
    AnchorLabel,
    BoxDelta,
    assign_labels,
    decode,
    encode,
    generate_anchors,
    sample_batch,
)
from rotbox.errors import (
    ConfigError,
    DataFormatError,
    InvalidDeltaError,
    InvalidParameterError,
    InvalidRectError,
    RotBoxError,
)
from rotbox.evaluate import MatchReport, PrCurve, match_image, pr_curve
from rotbox.geometry import (
    PointGrid,
    RotatedRect,
    canonicalize,
    exact_iou,
    fast_iou,
    iou_matrix,
    make_grid,
    sample_rect_pairs,
)
from rotbox.losses import (
    BACKGROUND,
    BUILDING,
    AnchorPrediction,
    LossConfig,
    cross_entropy,
    smooth_l1,
    total_loss,
)
from rotbox.postprocess import Detection, nms

__version__ = "0.1.0"

__all__ = [
    "backend_name",
    "AnchorGridConfig",
    "AnchorLabel",
    "BoxDelta",
    "assign_labels",
    "decode",
    "encode",
    "generate_anchors",
    "sample_batch",
    "ConfigError",
    "DataFormatError",
    "InvalidDeltaError",
    "InvalidParameterError",
    "InvalidRectError",
    "RotBoxError",
    "MatchReport",
    "PrCurve",
    "match_image",
    "pr_curve",
    "PointGrid",
    "RotatedRect",
    "canonicalize",
    "exact_iou",
    "fast_iou",
    "iou_matrix",
    "make_grid",
    "sample_rect_pairs",
    "BACKGROUND",
    "BUILDING",
    "AnchorPrediction",
    "LossConfig",
    "cross_entropy",
    "smooth_l1",
    "total_loss",
    "Detection",
    "nms",
]
