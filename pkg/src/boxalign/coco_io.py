"""COCO-format ingestion and serialization.

Reads "instances"-style annotation files (top-level keys `images`,
`annotations`, `categories`; bbox as [x, y, w, h]) into an immutable
`DatasetBundle`, and reads/writes detection-result files (flat list of
{image_id, category_id, bbox, score}).

Coordinates are parsed as reals and never rounded, so scaled detections
with fractional coordinates survive a round trip bit-exactly. Annotations
with zero width or height and "iscrowd" regions are excluded at load time
and counted in the bundle's load report; crowd-region ignore matching is
deliberately out of scope.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field

from .errors import ParseError, ReferentialError, SchemaError
from .geometry import Box, ImageSize, SizeCategory, size_category

__all__ = [
    "GroundTruthObject",
    "Detection",
    "ImageRecord",
    "LoadReport",
    "DatasetBundle",
    "load_ground_truth",
    "load_detections",
    "write_detections",
]


@dataclass(frozen=True)
class GroundTruthObject:
    """One ground-truth annotation with its derived size category."""

    annotation_id: int
    image_id: int
    category_id: int
    box: Box
    size_category: SizeCategory

    def __post_init__(self):
        if self.annotation_id < 0 or self.image_id < 0 or self.category_id < 0:
            raise ValueError("ground-truth ids must be non-negative")


@dataclass(frozen=True)
class Detection:
    """One detector output: box, category, image binding and confidence."""

    image_id: int
    category_id: int
    box: Box
    confidence: float

    def __post_init__(self):
        if not (0.0 <= self.confidence <= 1.0):
            raise ValueError(f"confidence must be in [0, 1], got {self.confidence}")


@dataclass(frozen=True)
class ImageRecord:
    image_id: int
    file_name: str
    size: ImageSize


@dataclass(frozen=True)
class LoadReport:
    """Counts of annotations excluded while loading a ground-truth file."""

    degenerate_boxes: int = 0
    crowd_regions: int = 0


@dataclass(frozen=True)
class DatasetBundle:
    """Cross-linked ground truth: images, objects and category names."""

    images: tuple[ImageRecord, ...]
    ground_truth: tuple[GroundTruthObject, ...]
    categories: dict[int, str]
    load_report: LoadReport = field(default_factory=LoadReport)

    def image_by_id(self, image_id: int) -> ImageRecord:
        return self._image_index[image_id]

    def __post_init__(self):
        object.__setattr__(
            self, "_image_index", {img.image_id: img for img in self.images}
        )


def _require_keys(obj: dict, keys: tuple[str, ...], context: str) -> None:
    for key in keys:
        if key not in obj:
            raise SchemaError(f"{context}: missing required key {key!r}")


def _as_number(value, context: str) -> float:
    if isinstance(value, bool) or not isinstance(value, (int, float)):
        raise ParseError(f"{context}: expected a number, got {value!r}")
    if not math.isfinite(float(value)):
        raise ParseError(f"{context}: expected a finite number, got {value!r}")
    return float(value)


def _as_int(value, context: str) -> int:
    if isinstance(value, bool) or not isinstance(value, int):
        raise ParseError(f"{context}: expected an integer, got {value!r}")
    return value


def _parse_bbox(raw, context: str) -> tuple[float, float, float, float]:
    if not isinstance(raw, (list, tuple)) or len(raw) != 4:
        raise ParseError(f"{context}: bbox must be a [x, y, w, h] list, got {raw!r}")
    return tuple(_as_number(v, f"{context}.bbox") for v in raw)  # type: ignore[return-value]


def _load_json(path) -> object:
    try:
        with open(path, "r", encoding="utf-8") as fh:
            return json.load(fh)
    except json.JSONDecodeError as exc:
        raise ParseError(f"{path}: malformed JSON: {exc}") from exc


def load_ground_truth(path) -> DatasetBundle:
    """Load a COCO instances annotation file into a `DatasetBundle`.

    Annotations with zero-width/zero-height boxes or iscrowd=1 are excluded
    and counted in the bundle's load report. Every annotation must reference
    an image and category declared in the file.

    Raises:
        ParseError: Malformed JSON or malformed field values.
        SchemaError: Missing top-level or per-record keys.
        ReferentialError: An annotation references an unknown image or
            category id.
    """
    doc = _load_json(path)
    if not isinstance(doc, dict):
        raise SchemaError(f"{path}: expected a JSON object at top level")
    _require_keys(doc, ("images", "annotations", "categories"), str(path))

    images: list[ImageRecord] = []
    for i, rec in enumerate(doc["images"]):
        ctx = f"{path}: images[{i}]"
        _require_keys(rec, ("id", "file_name", "width", "height"), ctx)
        width = _as_number(rec["width"], ctx)
        height = _as_number(rec["height"], ctx)
        if width <= 0 or height <= 0:
            raise ParseError(f"{ctx}: image size must be positive")
        images.append(
            ImageRecord(
                image_id=_as_int(rec["id"], ctx),
                file_name=str(rec["file_name"]),
                size=ImageSize(width, height),
            )
        )
    image_ids = {img.image_id for img in images}
    if len(image_ids) != len(images):
        raise ParseError(f"{path}: duplicate image ids")

    categories: dict[int, str] = {}
    for i, rec in enumerate(doc["categories"]):
        ctx = f"{path}: categories[{i}]"
        _require_keys(rec, ("id", "name"), ctx)
        categories[_as_int(rec["id"], ctx)] = str(rec["name"])

    ground_truth: list[GroundTruthObject] = []
    degenerate = 0
    crowds = 0
    for i, rec in enumerate(doc["annotations"]):
        ctx = f"{path}: annotations[{i}]"
        _require_keys(rec, ("id", "image_id", "category_id", "bbox"), ctx)
        image_id = _as_int(rec["image_id"], ctx)
        category_id = _as_int(rec["category_id"], ctx)
        if image_id not in image_ids:
            raise ReferentialError(f"{ctx}: unknown image_id {image_id}")
        if category_id not in categories:
            raise ReferentialError(f"{ctx}: unknown category_id {category_id}")
        if rec.get("iscrowd", 0) == 1:
            crowds += 1
            continue
        x, y, w, h = _parse_bbox(rec["bbox"], ctx)
        if w <= 0 or h <= 0:
            degenerate += 1
            continue
        box = Box(x, y, w, h)
        ground_truth.append(
            GroundTruthObject(
                annotation_id=_as_int(rec["id"], ctx),
                image_id=image_id,
                category_id=category_id,
                box=box,
                size_category=size_category(box),
            )
        )

    return DatasetBundle(
        images=tuple(images),
        ground_truth=tuple(ground_truth),
        categories=categories,
        load_report=LoadReport(degenerate_boxes=degenerate, crowd_regions=crowds),
    )


def load_detections(path, bundle: DatasetBundle) -> list[Detection]:
    """Load a COCO results file and cross-check it against a bundle.

    Detections are returned sorted by (image_id, descending confidence),
    ties broken by input order. Records referencing unknown image or
    category ids are rejected with ReferentialError; scores outside [0, 1]
    and degenerate boxes are rejected with ParseError.
    """
    doc = _load_json(path)
    if not isinstance(doc, list):
        raise SchemaError(f"{path}: expected a JSON array of detection records")
    image_ids = {img.image_id for img in bundle.images}

    detections: list[Detection] = []
    for i, rec in enumerate(doc):
        ctx = f"{path}: detections[{i}]"
        if not isinstance(rec, dict):
            raise ParseError(f"{ctx}: expected an object")
        _require_keys(rec, ("image_id", "category_id", "bbox", "score"), ctx)
        image_id = _as_int(rec["image_id"], ctx)
        category_id = _as_int(rec["category_id"], ctx)
        if image_id not in image_ids:
            raise ReferentialError(f"{ctx}: unknown image_id {image_id}")
        if category_id not in bundle.categories:
            raise ReferentialError(f"{ctx}: unknown category_id {category_id}")
        score = _as_number(rec["score"], ctx)
        if not (0.0 <= score <= 1.0):
            raise ParseError(f"{ctx}: score {score} outside [0, 1]")
        x, y, w, h = _parse_bbox(rec["bbox"], ctx)
        if w <= 0 or h <= 0:
            raise ParseError(f"{ctx}: degenerate bbox {rec['bbox']!r}")
        detections.append(
            Detection(
                image_id=image_id,
                category_id=category_id,
                box=Box(x, y, w, h),
                confidence=score,
            )
        )

    order = sorted(
        range(len(detections)),
        key=lambda i: (detections[i].image_id, -detections[i].confidence, i),
    )
    return [detections[i] for i in order]


def write_detections(dets: list[Detection], path) -> None:
    """Write detections in the COCO results layout.

    Coordinates are serialized with full float round-trip precision, so
    `load_detections(write_detections(d))` reproduces `d` bit-exactly for
    any list already in the loader's canonical (image_id, -confidence)
    order; input order is preserved on disk.
    """
    records = [
        {
            "image_id": d.image_id,
            "category_id": d.category_id,
            "bbox": [d.box.x_min, d.box.y_min, d.box.width, d.box.height],
            "score": d.confidence,
        }
        for d in dets
    ]
    with open(path, "w", encoding="utf-8") as fh:
        json.dump(records, fh)
