"""Tests for box arithmetic: area, IoU, centered scaling, size categories."""

import math

import pytest
from hypothesis import given
from hypothesis import strategies as st

from boxalign.errors import DegenerateResultError
from boxalign.geometry import (
    Box,
    ImageSize,
    SizeCategory,
    area,
    iou,
    scale_box,
    size_category,
)

IMG = ImageSize(1000, 1000)


def boxes(min_coord=0.0, max_coord=500.0, max_side=200.0):
    side = st.floats(0.5, max_side, allow_nan=False)
    coord = st.floats(min_coord, max_coord, allow_nan=False)
    return st.builds(Box, x_min=coord, y_min=coord, width=side, height=side)


class TestBoxInvariants:
    def test_rejects_nonpositive_extent(self):
        with pytest.raises(ValueError):
            Box(0, 0, 0, 10)
        with pytest.raises(ValueError):
            Box(0, 0, 10, -1)

    def test_rejects_nonfinite(self):
        with pytest.raises(ValueError):
            Box(float("nan"), 0, 10, 10)
        with pytest.raises(ValueError):
            Box(0, 0, float("inf"), 10)

    def test_image_size_positive(self):
        with pytest.raises(ValueError):
            ImageSize(0, 100)


class TestArea:
    def test_definition(self):
        assert area(Box(0, 0, 10, 10)) == 100
        assert area(Box(2, 3, 1, 1)) == 1
        assert area(Box(0, 0, 32, 32)) == 1024


class TestIou:
    def test_identity(self):
        b = Box(0, 0, 10, 10)
        assert iou(b, b) == 1.0

    def test_disjoint(self):
        assert iou(Box(0, 0, 10, 10), Box(20, 20, 5, 5)) == 0.0

    def test_half_overlap(self):
        # Intersection 50, union 150.
        assert iou(Box(0, 0, 10, 10), Box(5, 0, 10, 10)) == pytest.approx(1 / 3)

    def test_shared_edge_is_zero(self):
        assert iou(Box(0, 0, 10, 10), Box(10, 0, 10, 10)) == 0.0

    @given(a=boxes(), b=boxes())
    def test_symmetry_and_range(self, a, b):
        ab = iou(a, b)
        assert ab == iou(b, a)
        assert 0.0 <= ab <= 1.0

    @given(b=boxes())
    def test_one_only_for_identical(self, b):
        assert iou(b, b) == 1.0
        shifted = Box(b.x_min + b.width / 2, b.y_min, b.width, b.height)
        assert iou(b, shifted) < 1.0


class TestScaleBox:
    def test_doubles_linear_dims(self):
        scaled = scale_box(Box(40, 45, 20, 10), 4.0, IMG)
        assert scaled == Box(30, 40, 40, 20)

    def test_identity_is_exact(self):
        b = Box(12.3456, 7.8901, 55.5, 66.25)
        assert scale_box(b, 1.0, IMG) == b

    def test_enlarge_clips_to_image(self):
        img = ImageSize(100, 100)
        scaled = scale_box(Box(0, 0, 100, 100), 2.0, img)
        assert scaled == Box(0, 0, 100, 100)

    def test_degenerate_when_outside(self):
        img = ImageSize(100, 100)
        with pytest.raises(DegenerateResultError):
            scale_box(Box(200, 200, 10, 10), 1.0, img)

    def test_rejects_bad_factor(self):
        with pytest.raises(ValueError):
            scale_box(Box(0, 0, 10, 10), 0.0, IMG)

    @given(
        b=boxes(min_coord=50, max_coord=400, max_side=100),
        f=st.sampled_from([0.5, 0.67, 1.5, 2.0]),
    )
    def test_centered_scaling_iou_law(self, b, f):
        # Boxes start at coordinate >= 50 with side <= 100, so scaling by at
        # most sqrt(2) keeps them inside the 1000x1000 image: no clipping.
        scaled = scale_box(b, f, IMG)
        assert iou(b, scaled) == pytest.approx(min(f, 1 / f), abs=1e-9)

    @given(
        b=boxes(min_coord=50, max_coord=300, max_side=50),
        f1=st.floats(0.5, 2.0),
        f2=st.floats(0.5, 2.0),
    )
    def test_scaling_composition(self, b, f1, f2):
        composed = scale_box(scale_box(b, f1, IMG), f2, IMG)
        direct = scale_box(b, f1 * f2, IMG)
        assert composed.x_min == pytest.approx(direct.x_min, abs=1e-9)
        assert composed.y_min == pytest.approx(direct.y_min, abs=1e-9)
        assert composed.width == pytest.approx(direct.width, abs=1e-9)
        assert composed.height == pytest.approx(direct.height, abs=1e-9)

    @given(b=boxes(min_coord=100, max_coord=200, max_side=100), f=st.floats(0.25, 4.0))
    def test_unclipped_area_ratio(self, b, f):
        scaled = scale_box(b, f, IMG)
        assert area(scaled) / area(b) == pytest.approx(f, rel=1e-12)

    def test_preserves_center_when_unclipped(self):
        b = Box(100, 150, 40, 30)
        scaled = scale_box(b, 1.7, IMG)
        assert scaled.center[0] == pytest.approx(b.center[0], abs=1e-9)
        assert scaled.center[1] == pytest.approx(b.center[1], abs=1e-9)


class TestSizeCategory:
    def test_thresholds(self):
        assert size_category(Box(0, 0, 10, 10)) is SizeCategory.SMALL
        assert size_category(Box(0, 0, 50, 50)) is SizeCategory.MEDIUM
        assert size_category(Box(0, 0, 100, 100)) is SizeCategory.LARGE

    def test_boundaries(self):
        # 32^2 is medium (inclusive), 96^2 is medium (inclusive).
        assert size_category(Box(0, 0, 32, 32)) is SizeCategory.MEDIUM
        assert size_category(Box(0, 0, 96, 96)) is SizeCategory.MEDIUM
        assert size_category(Box(0, 0, 96, 96.001)) is SizeCategory.LARGE
