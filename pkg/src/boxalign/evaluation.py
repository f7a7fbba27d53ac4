"""Detection evaluation: greedy matching, PR curves, AP, and the census of
large vs small predicted boxes per IoU interval.

Matching is greedy in descending confidence (ties broken by input order):
each detection claims the unmatched ground-truth object of the same image
and category with the highest IoU, provided the IoU reaches the threshold.
AP uses COCO-style 101-point interpolation, and the headline `ap` averages
the per-threshold APs over 0.50:0.05:0.95 of the per-category means.

Everything here is deterministic: evaluation could be parallelized across
(image, category) pairs, but the final fold is always performed in sorted
category order so the result does not depend on any worker schedule.
"""

from __future__ import annotations

from bisect import bisect_right
from dataclasses import dataclass, field

from .coco_io import DatasetBundle, Detection, GroundTruthObject
from .errors import EmptyGroundTruthError
from .geometry import SizeCategory, area, iou, size_category

__all__ = [
    "MATCH_EPS",
    "DEFAULT_THRESHOLDS",
    "MatchEntry",
    "MatchResult",
    "PrCurve",
    "ApReport",
    "BinCounts",
    "SizeRatioHistogram",
    "match",
    "pr_curve",
    "average_precision",
    "evaluate",
    "size_ratio_histogram",
]

# A detection whose IoU is analytically equal to the threshold can land one
# ulp below it after sqrt-based box scaling; the comparison therefore
# tolerates 1e-9 so "IoU >= threshold" behaves as in exact arithmetic.
MATCH_EPS = 1e-9

# AP@[0.5:0.95] threshold grid (exact decimal floats).
DEFAULT_THRESHOLDS = tuple(round(0.50 + 0.05 * i, 2) for i in range(10))

_RECALL_GRID = tuple(round(0.01 * i, 2) for i in range(101))


@dataclass(frozen=True)
class MatchEntry:
    """Outcome for one detection at one IoU threshold."""

    detection_index: int
    matched_annotation_id: int | None
    iou_at_match: float
    is_true_positive: bool


@dataclass(frozen=True)
class MatchResult:
    """Greedy matching outcome at a single IoU threshold.

    `entries` are ordered by descending confidence (the ranking order used
    by the PR curve); `detection_index` points back into the input list.
    """

    threshold: float
    entries: tuple[MatchEntry, ...]
    num_ground_truth: int


@dataclass(frozen=True)
class PrCurve:
    """Cumulative (recall, precision) points in confidence-ranked order."""

    threshold: float
    points: tuple[tuple[float, float], ...]


@dataclass(frozen=True)
class ApReport:
    """AP summary: mean over thresholds, AP50, and breakdowns."""

    ap: float
    ap50: float | None
    per_threshold: dict[float, float]
    per_size: dict[SizeCategory, float] = field(default_factory=dict)


def _ranked_indices(dets: list[Detection]) -> list[int]:
    return sorted(range(len(dets)), key=lambda i: (-dets[i].confidence, i))


def match(
    dets: list[Detection], gts: list[GroundTruthObject], threshold: float
) -> MatchResult:
    """Greedily match detections to ground truth at one IoU threshold.

    Detections are processed in descending confidence (ties broken by
    ascending input index). Each detection matches the still-unmatched
    ground-truth object of the same image and category with the highest IoU,
    provided IoU >= threshold (IoU ties broken by ground-truth input order).
    """
    if not (0.0 < threshold <= 1.0):
        raise ValueError(f"IoU threshold must be in (0, 1], got {threshold}")
    by_image_category: dict[tuple[int, int], list[int]] = {}
    for j, gt in enumerate(gts):
        by_image_category.setdefault((gt.image_id, gt.category_id), []).append(j)

    matched_gt: set[int] = set()
    entries = []
    for i in _ranked_indices(dets):
        det = dets[i]
        best_j = None
        best_iou = 0.0
        for j in by_image_category.get((det.image_id, det.category_id), ()):
            if j in matched_gt:
                continue
            overlap = iou(det.box, gts[j].box)
            if overlap >= threshold - MATCH_EPS and overlap > best_iou:
                best_iou = overlap
                best_j = j
        if best_j is None:
            entries.append(MatchEntry(i, None, 0.0, False))
        else:
            matched_gt.add(best_j)
            entries.append(MatchEntry(i, gts[best_j].annotation_id, best_iou, True))
    return MatchResult(
        threshold=threshold, entries=tuple(entries), num_ground_truth=len(gts)
    )


def pr_curve(match_result: MatchResult) -> PrCurve:
    """Cumulative precision-recall points from a matching outcome.

    The recall denominator is the number of (non-excluded) ground-truth
    objects the matching was computed over.
    """
    n_gt = match_result.num_ground_truth
    if n_gt == 0:
        raise EmptyGroundTruthError(
            "no ground-truth objects exist for the requested category set"
        )
    points = []
    tp = 0
    for rank, entry in enumerate(match_result.entries, start=1):
        if entry.is_true_positive:
            tp += 1
        points.append((tp / n_gt, tp / rank))
    return PrCurve(threshold=match_result.threshold, points=tuple(points))


def average_precision(curve: PrCurve) -> float:
    """COCO-style 101-point interpolated AP.

    AP is the mean over recall grid points r in {0.00, 0.01, ..., 1.00} of
    the maximum precision among curve points with recall >= r (0 when no
    such point exists).
    """
    # Max precision at recall >= r is monotone in r; a single reverse sweep
    # over the curve fills the grid.
    best_at = [0.0] * len(_RECALL_GRID)
    running_max = 0.0
    points = sorted(curve.points, key=lambda p: p[0])
    k = len(points) - 1
    for gi in range(len(_RECALL_GRID) - 1, -1, -1):
        r = _RECALL_GRID[gi]
        while k >= 0 and points[k][0] >= r:
            if points[k][1] > running_max:
                running_max = points[k][1]
            k -= 1
        best_at[gi] = running_max
    total = 0.0
    for value in best_at:
        total += value
    return total / len(_RECALL_GRID)


def _category_ap(
    dets: list[Detection],
    gts: list[GroundTruthObject],
    threshold: float,
) -> float:
    result = match(dets, gts, threshold)
    return average_precision(pr_curve(result))


def evaluate(
    dets: list[Detection],
    bundle: DatasetBundle,
    thresholds: tuple[float, ...] | list[float] = DEFAULT_THRESHOLDS,
) -> ApReport:
    """Full AP report over a detection set.

    Per threshold, AP is averaged over the categories that have at least one
    ground-truth object (in sorted category-id order); `ap` is the mean of
    the per-threshold values and `ap50` the entry at threshold 0.50 when
    present. `per_size` re-runs the evaluation restricted to each object
    size category (ground truths of that size against detections whose own
    box falls in the same size range; an approximation of COCO's
    ignore-region semantics, see README).

    Raises:
        EmptyGroundTruthError: If the bundle has no ground-truth objects.
    """
    thresholds = tuple(thresholds)
    if not thresholds:
        raise ValueError("thresholds must be non-empty")
    for t in thresholds:
        if not (0.0 < t <= 1.0):
            raise ValueError(f"IoU threshold must be in (0, 1], got {t}")
    if not bundle.ground_truth:
        raise EmptyGroundTruthError("bundle contains no ground-truth objects")

    per_threshold = _mean_ap_by_threshold(dets, list(bundle.ground_truth), thresholds)
    ap = _mean(list(per_threshold.values()))
    ap50 = None
    for t, value in per_threshold.items():
        if abs(t - 0.50) < 1e-9:
            ap50 = value

    per_size: dict[SizeCategory, float] = {}
    for cat in SizeCategory:
        gts_s = [g for g in bundle.ground_truth if g.size_category is cat]
        if not gts_s:
            continue
        dets_s = [d for d in dets if size_category(d.box) is cat]
        by_threshold = _mean_ap_by_threshold(dets_s, gts_s, thresholds)
        per_size[cat] = _mean(list(by_threshold.values()))

    return ApReport(ap=ap, ap50=ap50, per_threshold=per_threshold, per_size=per_size)


def _mean(values: list[float]) -> float:
    total = 0.0
    for v in values:
        total += v
    return total / len(values)


def _mean_ap_by_threshold(
    dets: list[Detection],
    gts: list[GroundTruthObject],
    thresholds: tuple[float, ...],
) -> dict[float, float]:
    category_ids = sorted({g.category_id for g in gts})
    dets_by_cat = {c: [d for d in dets if d.category_id == c] for c in category_ids}
    gts_by_cat = {c: [g for g in gts if g.category_id == c] for c in category_ids}
    per_threshold: dict[float, float] = {}
    for t in thresholds:
        cat_aps = [
            _category_ap(dets_by_cat[c], gts_by_cat[c], t) for c in category_ids
        ]
        per_threshold[t] = _mean(cat_aps)
    return per_threshold


@dataclass(frozen=True)
class BinCounts:
    larger: int = 0
    smaller: int = 0
    equal: int = 0


@dataclass(frozen=True)
class SizeRatioHistogram:
    """Census of predicted-vs-ground-truth box sizes per IoU interval.

    `bins[i]` covers IoU in [edges[i], edges[i+1]); the final bin is closed
    at the top so a perfect IoU of 1.0 is still counted. Detections that
    never match at the lowest edge have no defined ground-truth partner and
    are only counted in `excluded`.
    """

    bin_edges: tuple[float, ...]
    bins: tuple[BinCounts, ...]
    per_size: dict[SizeCategory, tuple[BinCounts, ...]]
    excluded: int


DEFAULT_HISTOGRAM_EDGES = tuple(round(0.3 + 0.1 * i, 1) for i in range(8))


def size_ratio_histogram(
    dets: list[Detection],
    bundle: DatasetBundle,
    bin_edges: tuple[float, ...] = DEFAULT_HISTOGRAM_EDGES,
) -> SizeRatioHistogram:
    """Count larger/smaller/equal predicted boxes per IoU interval.

    Detections are matched greedily at the lowest bin edge (0.3 by
    default); each matched detection contributes to exactly one bin,
    classified by comparing its area against the matched ground truth's
    area. The per-size breakdown uses the ground-truth object's size
    category.
    """
    if len(bin_edges) < 2 or any(
        b <= a for a, b in zip(bin_edges, bin_edges[1:])
    ):
        raise ValueError("bin_edges must contain at least two increasing values")
    gts = list(bundle.ground_truth)
    gt_by_id = {g.annotation_id: g for g in gts}
    result = match(dets, gts, bin_edges[0])

    n_bins = len(bin_edges) - 1
    counts = [[0, 0, 0] for _ in range(n_bins)]
    per_size_counts = {
        cat: [[0, 0, 0] for _ in range(n_bins)] for cat in SizeCategory
    }
    excluded = 0
    for entry in result.entries:
        if not entry.is_true_positive:
            excluded += 1
            continue
        gt = gt_by_id[entry.matched_annotation_id]
        idx = _bin_index(entry.iou_at_match, bin_edges)
        det_area = area(dets[entry.detection_index].box)
        gt_area = area(gt.box)
        slot = 0 if det_area > gt_area else (1 if det_area < gt_area else 2)
        counts[idx][slot] += 1
        per_size_counts[gt.size_category][idx][slot] += 1

    def freeze(rows: list[list[int]]) -> tuple[BinCounts, ...]:
        return tuple(BinCounts(larger=r[0], smaller=r[1], equal=r[2]) for r in rows)

    return SizeRatioHistogram(
        bin_edges=tuple(bin_edges),
        bins=freeze(counts),
        per_size={cat: freeze(rows) for cat, rows in per_size_counts.items()},
        excluded=excluded,
    )


def _bin_index(value: float, edges: tuple[float, ...]) -> int:
    if value >= edges[-1]:
        return len(edges) - 2
    idx = bisect_right(edges, value) - 1
    return max(idx, 0)
