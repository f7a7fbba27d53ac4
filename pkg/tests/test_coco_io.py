"""Tests for COCO ingestion and detection-file round trips."""

import json

import pytest
from hypothesis import given
from hypothesis import strategies as st

from boxalign.coco_io import (
    Detection,
    load_detections,
    load_ground_truth,
    write_detections,
)
from boxalign.errors import ParseError, ReferentialError, SchemaError
from boxalign.geometry import Box, SizeCategory


def make_gt_doc(annotations, images=None, categories=None):
    if images is None:
        images = [{"id": 1, "file_name": "a.jpg", "width": 640, "height": 480}]
    if categories is None:
        categories = [{"id": 1, "name": "cat"}]
    return {"images": images, "annotations": annotations, "categories": categories}


def write_doc(tmp_path, doc, name="gt.json"):
    path = tmp_path / name
    path.write_text(json.dumps(doc))
    return path


@pytest.fixture
def simple_bundle(tmp_path):
    doc = make_gt_doc(
        [{"id": 10, "image_id": 1, "category_id": 1, "bbox": [0, 0, 10, 10]}]
    )
    return load_ground_truth(write_doc(tmp_path, doc))


class TestLoadGroundTruth:
    def test_minimal_file(self, simple_bundle):
        assert len(simple_bundle.ground_truth) == 1
        obj = simple_bundle.ground_truth[0]
        assert obj.annotation_id == 10
        assert obj.box == Box(0, 0, 10, 10)
        assert obj.size_category is SizeCategory.SMALL
        assert simple_bundle.categories == {1: "cat"}

    def test_zero_width_excluded_and_counted(self, tmp_path):
        doc = make_gt_doc(
            [
                {"id": 1, "image_id": 1, "category_id": 1, "bbox": [5, 5, 0, 10]},
                {"id": 2, "image_id": 1, "category_id": 1, "bbox": [0, 0, 5, 5]},
            ]
        )
        bundle = load_ground_truth(write_doc(tmp_path, doc))
        assert len(bundle.ground_truth) == 1
        assert bundle.load_report.degenerate_boxes == 1

    def test_crowd_excluded_and_counted(self, tmp_path):
        doc = make_gt_doc(
            [
                {
                    "id": 1,
                    "image_id": 1,
                    "category_id": 1,
                    "bbox": [0, 0, 5, 5],
                    "iscrowd": 1,
                }
            ]
        )
        bundle = load_ground_truth(write_doc(tmp_path, doc))
        assert len(bundle.ground_truth) == 0
        assert bundle.load_report.crowd_regions == 1

    def test_dangling_image_id(self, tmp_path):
        doc = make_gt_doc(
            [{"id": 1, "image_id": 99, "category_id": 1, "bbox": [0, 0, 5, 5]}]
        )
        with pytest.raises(ReferentialError):
            load_ground_truth(write_doc(tmp_path, doc))

    def test_dangling_category_id(self, tmp_path):
        doc = make_gt_doc(
            [{"id": 1, "image_id": 1, "category_id": 9, "bbox": [0, 0, 5, 5]}]
        )
        with pytest.raises(ReferentialError):
            load_ground_truth(write_doc(tmp_path, doc))

    def test_missing_top_level_key(self, tmp_path):
        path = write_doc(tmp_path, {"images": [], "annotations": []})
        with pytest.raises(SchemaError):
            load_ground_truth(path)

    def test_missing_record_key(self, tmp_path):
        doc = make_gt_doc([{"id": 1, "image_id": 1, "bbox": [0, 0, 5, 5]}])
        with pytest.raises(SchemaError):
            load_ground_truth(write_doc(tmp_path, doc))

    def test_malformed_json(self, tmp_path):
        path = tmp_path / "bad.json"
        path.write_text("{not json")
        with pytest.raises(ParseError):
            load_ground_truth(path)

    def test_fractional_coordinates_preserved(self, tmp_path):
        doc = make_gt_doc(
            [
                {
                    "id": 1,
                    "image_id": 1,
                    "category_id": 1,
                    "bbox": [1.25, 2.5, 10.125, 20.0625],
                }
            ]
        )
        bundle = load_ground_truth(write_doc(tmp_path, doc))
        assert bundle.ground_truth[0].box == Box(1.25, 2.5, 10.125, 20.0625)

    def test_deterministic(self, tmp_path):
        doc = make_gt_doc(
            [
                {"id": i, "image_id": 1, "category_id": 1, "bbox": [i, 0, 5, 5]}
                for i in range(20)
            ]
        )
        path = write_doc(tmp_path, doc)
        first = load_ground_truth(path)
        second = load_ground_truth(path)
        assert first.ground_truth == second.ground_truth
        assert first.images == second.images


class TestLoadDetections:
    def test_single_record(self, tmp_path, simple_bundle):
        path = write_doc(
            tmp_path,
            [{"image_id": 1, "category_id": 1, "bbox": [0, 0, 10, 10], "score": 0.9}],
            "det.json",
        )
        dets = load_detections(path, simple_bundle)
        assert len(dets) == 1
        assert dets[0].confidence == 0.9

    def test_empty_list(self, tmp_path, simple_bundle):
        path = write_doc(tmp_path, [], "det.json")
        assert load_detections(path, simple_bundle) == []

    def test_score_out_of_range(self, tmp_path, simple_bundle):
        path = write_doc(
            tmp_path,
            [{"image_id": 1, "category_id": 1, "bbox": [0, 0, 10, 10], "score": 1.3}],
            "det.json",
        )
        with pytest.raises(ParseError):
            load_detections(path, simple_bundle)

    def test_unknown_image_rejected(self, tmp_path, simple_bundle):
        path = write_doc(
            tmp_path,
            [{"image_id": 5, "category_id": 1, "bbox": [0, 0, 10, 10], "score": 0.5}],
            "det.json",
        )
        with pytest.raises(ReferentialError):
            load_detections(path, simple_bundle)

    def test_sorted_by_image_then_confidence(self, tmp_path):
        doc = make_gt_doc(
            [{"id": 1, "image_id": 1, "category_id": 1, "bbox": [0, 0, 5, 5]}],
            images=[
                {"id": 1, "file_name": "a.jpg", "width": 640, "height": 480},
                {"id": 2, "file_name": "b.jpg", "width": 640, "height": 480},
            ],
        )
        bundle = load_ground_truth(write_doc(tmp_path, doc))
        records = [
            {"image_id": 2, "category_id": 1, "bbox": [0, 0, 1, 1], "score": 0.9},
            {"image_id": 1, "category_id": 1, "bbox": [0, 0, 1, 1], "score": 0.2},
            {"image_id": 1, "category_id": 1, "bbox": [0, 0, 1, 1], "score": 0.8},
        ]
        dets = load_detections(write_doc(tmp_path, records, "det.json"), bundle)
        assert [(d.image_id, d.confidence) for d in dets] == [
            (1, 0.8),
            (1, 0.2),
            (2, 0.9),
        ]


class TestWriteDetections:
    def test_round_trip(self, tmp_path, simple_bundle):
        dets = [
            Detection(1, 1, Box(0.123456789, 1.5, 10.000001, 20.25), 0.875),
            Detection(1, 1, Box(5, 5, 1, 1), 0.5),
            Detection(1, 1, Box(2, 3, 4, 5), 0.0),
        ]
        path = tmp_path / "round.json"
        write_detections(dets, path)
        assert load_detections(path, simple_bundle) == dets

    def test_empty_list(self, tmp_path, simple_bundle):
        path = tmp_path / "empty.json"
        write_detections([], path)
        assert load_detections(path, simple_bundle) == []
        assert json.loads(path.read_text()) == []

    def test_zero_confidence_preserved(self, tmp_path, simple_bundle):
        path = tmp_path / "zero.json"
        write_detections([Detection(1, 1, Box(0, 0, 1, 1), 0.0)], path)
        assert load_detections(path, simple_bundle)[0].confidence == 0.0

    @given(
        data=st.lists(
            st.tuples(
                st.floats(0, 100, allow_nan=False),
                st.floats(0, 100, allow_nan=False),
                st.floats(0.1, 50, allow_nan=False),
                st.floats(0.1, 50, allow_nan=False),
                st.floats(0, 1, allow_nan=False),
            ),
            max_size=8,
        )
    )
    def test_round_trip_property(self, data, tmp_path_factory):
        dets = [
            Detection(1, 1, Box(x, y, w, h), conf) for x, y, w, h, conf in data
        ]
        dets.sort(key=lambda d: -d.confidence)
        path = tmp_path_factory.mktemp("rt") / "dets.json"
        write_detections(dets, path)
        doc = make_gt_doc(
            [{"id": 1, "image_id": 1, "category_id": 1, "bbox": [0, 0, 5, 5]}]
        )
        gt_path = tmp_path_factory.mktemp("rt") / "gt.json"
        gt_path.write_text(json.dumps(doc))
        bundle = load_ground_truth(gt_path)
        assert load_detections(path, bundle) == dets
