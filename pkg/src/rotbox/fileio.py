"""Line-oriented file formats for annotations, detections, and anchor configs.

Annotation and detection files group comma-separated tuples under
`# image <id>` headers:

    # image scene-001
    224.0,224.0,0.5235987755982988,120.0,60.0

Annotation rows are (x, y, alpha, h, w); detection rows append a score in
[0, 1].  Angles are radians unless the caller asks for degrees.  Rows are
canonicalized on read; serialization uses repr() floats so a
parse -> serialize -> parse round trip is exact.  Files are UTF-8 with LF
line endings.

Anchor configs are flat `key = value` text with keys feat_width,
feat_height, stride, scales, angles, and optional aspect; scales and
angles are comma-separated lists.
"""

from __future__ import annotations

import math

from rotbox.anchors import AnchorGridConfig
from rotbox.errors import ConfigError, DataFormatError
from rotbox.geometry import RotatedRect, canonicalize
from rotbox.postprocess import Detection

__all__ = [
    "parse_annotations",
    "parse_detections",
    "serialize_annotations",
    "serialize_detections",
    "parse_anchor_config",
]

_IMAGE_PREFIX = "# image "


def _to_radians(alpha: float, degrees: bool) -> float:
    return math.radians(alpha) if degrees else alpha


def _parse_floats(body: str, lineno: int, expected: int) -> list[float]:
    parts = body.split(",")
    if len(parts) != expected:
        raise DataFormatError(f"line {lineno}: expected {expected} comma-separated values")
    out = []
    for p in parts:
        try:
            out.append(float(p))
        except ValueError:
            raise DataFormatError(f"line {lineno}: not a number: {p.strip()!r}") from None
    return out


def _parse_grouped(text: str, fields: int, degrees: bool):
    """Yield (image_id, lineno, float row) triples; enforce header structure."""
    current: str | None = None
    seen: set[str] = set()
    rows: list[tuple[str, int, list[float]]] = []
    order: list[str] = []
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.strip()
        if not line:
            continue
        if line.startswith("#"):
            if not line.startswith(_IMAGE_PREFIX):
                raise DataFormatError(
                    f"line {lineno}: expected '# image <id>' header, got {line!r}"
                )
            image_id = line[len(_IMAGE_PREFIX):].strip()
            if not image_id:
                raise DataFormatError(f"line {lineno}: image header without an id")
            if image_id in seen:
                raise DataFormatError(f"line {lineno}: duplicate image id {image_id!r}")
            seen.add(image_id)
            order.append(image_id)
            current = image_id
            continue
        if current is None:
            raise DataFormatError(f"line {lineno}: data before any '# image <id>' header")
        values = _parse_floats(line, lineno, fields)
        values[2] = _to_radians(values[2], degrees)
        rows.append((current, lineno, values))
    return order, rows


def parse_annotations(text: str, degrees: bool = False) -> dict[str, list[RotatedRect]]:
    """Parse an annotation file into image id -> canonical rectangles."""
    order, rows = _parse_grouped(text, 5, degrees)
    out: dict[str, list[RotatedRect]] = {image_id: [] for image_id in order}
    for image_id, lineno, v in rows:
        try:
            out[image_id].append(canonicalize(v[0], v[1], v[2], v[3], v[4]))
        except ValueError as exc:
            raise DataFormatError(f"line {lineno}: {exc}") from None
    return out


def parse_detections(text: str, degrees: bool = False) -> dict[str, list[Detection]]:
    """Parse a detection file into image id -> scored detections."""
    order, rows = _parse_grouped(text, 6, degrees)
    out: dict[str, list[Detection]] = {image_id: [] for image_id in order}
    for image_id, lineno, v in rows:
        try:
            rect = canonicalize(v[0], v[1], v[2], v[3], v[4])
            out[image_id].append(Detection(rect=rect, score=v[5]))
        except ValueError as exc:
            raise DataFormatError(f"line {lineno}: {exc}") from None
    return out


def serialize_annotations(images: dict[str, list[RotatedRect]]) -> str:
    lines = []
    for image_id, rects in images.items():
        lines.append(f"# image {image_id}")
        for r in rects:
            lines.append(",".join(repr(v) for v in r.astuple()))
    return "\n".join(lines) + "\n" if lines else ""


def serialize_detections(images: dict[str, list[Detection]]) -> str:
    lines = []
    for image_id, dets in images.items():
        lines.append(f"# image {image_id}")
        for d in dets:
            lines.append(",".join(repr(v) for v in (*d.rect.astuple(), d.score)))
    return "\n".join(lines) + "\n" if lines else ""


_CONFIG_KEYS = {"feat_width", "feat_height", "stride", "scales", "angles", "aspect"}
_REQUIRED_KEYS = {"feat_width", "feat_height", "stride", "scales", "angles"}


def _config_int(raw: str, key: str) -> int:
    try:
        return int(raw)
    except ValueError:
        raise ConfigError(f"{key} must be an integer, got {raw!r}") from None


def _config_float(raw: str, key: str) -> float:
    try:
        return float(raw)
    except ValueError:
        raise ConfigError(f"{key} must be a number, got {raw!r}") from None


def _config_list(raw: str, key: str) -> tuple[float, ...]:
    try:
        return tuple(float(p) for p in raw.split(","))
    except ValueError:
        raise ConfigError(f"{key} must be comma-separated numbers, got {raw!r}") from None


def parse_anchor_config(text: str, degrees: bool = False) -> AnchorGridConfig:
    """Parse flat `key = value` anchor-config text."""
    values: dict[str, str] = {}
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.strip()
        if not line or line.startswith("#"):
            continue
        if "=" not in line:
            raise ConfigError(f"line {lineno}: expected 'key = value', got {line!r}")
        key, _, val = line.partition("=")
        key = key.strip()
        val = val.strip()
        if key not in _CONFIG_KEYS:
            raise ConfigError(f"line {lineno}: unknown key {key!r}")
        if key in values:
            raise ConfigError(f"line {lineno}: duplicate key {key!r}")
        values[key] = val
    missing = sorted(_REQUIRED_KEYS - values.keys())
    if missing:
        raise ConfigError(f"missing config keys: {', '.join(missing)}")
    angles = _config_list(values["angles"], "angles")
    if degrees:
        angles = tuple(math.radians(a) for a in angles)
    return AnchorGridConfig(
        feat_width=_config_int(values["feat_width"], "feat_width"),
        feat_height=_config_int(values["feat_height"], "feat_height"),
        stride=_config_float(values["stride"], "stride"),
        scales=_config_list(values["scales"], "scales"),
        angles=angles,
        aspect=_config_float(values.get("aspect", "1.0"), "aspect"),
    )
