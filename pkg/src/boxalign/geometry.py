"""Axis-aligned bounding-box arithmetic.

Boxes are stored as (x_min, y_min, width, height) in continuous pixel
coordinates, matching the COCO annotation format. Area scaling is centered
on the box and expressed as an AREA multiplier: a factor f multiplies each
linear dimension by sqrt(f). Scaled boxes are intersected with the image
rectangle so they never exceed the image boundaries.

All functions are pure and operate on immutable values; they are safe to
call concurrently from any number of threads.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass

from .errors import DegenerateResultError

__all__ = [
    "Box",
    "ImageSize",
    "SizeCategory",
    "area",
    "iou",
    "scale_box",
    "size_category",
    "SMALL_AREA_MAX",
    "MEDIUM_AREA_MAX",
]

# COCO object-size convention, applied to the ground-truth box area.
SMALL_AREA_MAX = 32.0**2
MEDIUM_AREA_MAX = 96.0**2


@dataclass(frozen=True)
class Box:
    """Axis-aligned rectangle with strictly positive extent.

    Attributes:
        x_min, y_min: Top-left corner in pixels.
        width, height: Extent in pixels; must be > 0 and finite.
    """

    x_min: float
    y_min: float
    width: float
    height: float

    def __post_init__(self):
        for name in ("x_min", "y_min", "width", "height"):
            value = getattr(self, name)
            if not math.isfinite(value):
                raise ValueError(f"Box.{name} must be finite, got {value!r}")
        if self.width <= 0 or self.height <= 0:
            raise ValueError(
                f"Box width and height must be > 0, got {self.width}x{self.height}"
            )

    @property
    def x_max(self) -> float:
        return self.x_min + self.width

    @property
    def y_max(self) -> float:
        return self.y_min + self.height

    @property
    def center(self) -> tuple[float, float]:
        return (self.x_min + self.width / 2.0, self.y_min + self.height / 2.0)


@dataclass(frozen=True)
class ImageSize:
    """Pixel dimensions of an image; both sides strictly positive."""

    width: float
    height: float

    def __post_init__(self):
        if not (self.width > 0 and self.height > 0):
            raise ValueError(
                f"ImageSize must be positive, got {self.width}x{self.height}"
            )


class SizeCategory(enum.Enum):
    """COCO-style object-size partition by ground-truth box area."""

    SMALL = "small"
    MEDIUM = "medium"
    LARGE = "large"


def area(box: Box) -> float:
    """Return the box area in pixels squared."""
    return box.width * box.height


def iou(a: Box, b: Box) -> float:
    """Intersection over union of two boxes, in [0, 1].

    Symmetric; 1.0 exactly for identical boxes; 0.0 when the interiors are
    disjoint (boxes sharing only an edge have zero-area intersection and
    therefore IoU 0).
    """
    ax2, ay2 = a.x_max, a.y_max
    bx2, by2 = b.x_max, b.y_max
    inter_w = min(ax2, bx2) - max(a.x_min, b.x_min)
    inter_h = min(ay2, by2) - max(a.y_min, b.y_min)
    if inter_w <= 0.0 or inter_h <= 0.0:
        return 0.0
    inter = inter_w * inter_h
    # Areas from the same corner arithmetic as the intersection, so that
    # identical boxes give exactly 1.0.
    area_a = (ax2 - a.x_min) * (ay2 - a.y_min)
    area_b = (bx2 - b.x_min) * (by2 - b.y_min)
    union = area_a + area_b - inter
    return inter / union


def scale_box(box: Box, factor: float, img: ImageSize) -> Box:
    """Scale a box's AREA by `factor` about its center, then clip to the image.

    Each linear dimension is multiplied by sqrt(factor) while the center
    stays fixed; the result is intersected with the closed image rectangle
    [0, img.width] x [0, img.height]. When no clipping occurs the area ratio
    equals `factor` exactly (up to float rounding), and factor 1.0 on an
    in-image box is the exact identity.

    Args:
        box: Box to scale; must intersect the image rectangle.
        factor: Positive area multiplier (not a linear multiplier).
        img: Image bounds used for clipping.

    Raises:
        DegenerateResultError: If clipping yields zero width or height,
            which is only possible when the input box lies outside the image.
    """
    if not (factor > 0 and math.isfinite(factor)):
        raise ValueError(f"scale factor must be a positive finite real, got {factor!r}")
    lin = math.sqrt(factor)
    new_w = box.width * lin
    new_h = box.height * lin
    # Anchor on the top-left shift rather than reconstructing from the
    # center so that factor 1.0 keeps the coordinates bit-identical.
    left = box.x_min - (new_w - box.width) / 2.0
    top = box.y_min - (new_h - box.height) / 2.0
    right = left + new_w
    bottom = top + new_h

    if left < 0.0 or top < 0.0 or right > img.width or bottom > img.height:
        left_c = max(0.0, left)
        top_c = max(0.0, top)
        right_c = min(img.width, right)
        bottom_c = min(img.height, bottom)
        new_w = right_c - left_c
        new_h = bottom_c - top_c
        if new_w <= 0.0 or new_h <= 0.0:
            raise DegenerateResultError(
                f"scaling by {factor} clipped box {box} to zero extent; "
                f"the input box lies outside the {img.width}x{img.height} image"
            )
        return Box(left_c, top_c, new_w, new_h)
    return Box(left, top, new_w, new_h)


def size_category(box: Box) -> SizeCategory:
    """Classify a box as SMALL (< 32^2 px^2), MEDIUM (32^2..96^2) or LARGE.

    Classification is meant to be applied to the ground-truth box so that a
    scaled or predicted box never changes an object's category.
    """
    a = area(box)
    if a < SMALL_AREA_MAX:
        return SizeCategory.SMALL
    if a <= MEDIUM_AREA_MAX:
        return SizeCategory.MEDIUM
    return SizeCategory.LARGE
