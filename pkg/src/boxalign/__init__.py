"""boxalign: align object-detector bounding boxes with human size preference.

The package covers the full quantitative pipeline: box geometry and area
scaling (`geometry`), COCO ingestion (`coco_io`), AP evaluation and the
large-vs-small census (`evaluation`), the asymmetric smooth-L1 loss
(`losses`), the desk-scale regressor demonstrating its size bias
(`regression`), preference statistics (`stats`), and the judgment
collection service (`study`, `service`). The `boxalign` CLI exposes each
step; see README.md.
"""

from .coco_io import (
    DatasetBundle,
    Detection,
    GroundTruthObject,
    ImageRecord,
    LoadReport,
    load_detections,
    load_ground_truth,
    write_detections,
)
from .errors import (
    BoxalignError,
    DegenerateResultError,
    DegenerateTableError,
    DuplicateSubmissionError,
    EmptyGroundTruthError,
    InvalidSelectionError,
    NonConvergenceError,
    NonFiniteInputError,
    ParseError,
    ReferentialError,
    SchemaError,
    StudyCompleteError,
    UnknownOptionError,
    UnknownStudyError,
)
from .evaluation import (
    ApReport,
    MatchResult,
    PrCurve,
    SizeRatioHistogram,
    average_precision,
    evaluate,
    match,
    pr_curve,
    size_ratio_histogram,
)
from .geometry import Box, ImageSize, SizeCategory, area, iou, scale_box, size_category
from .losses import (
    AsymmetricLossParams,
    box_regression_loss,
    loss_gradient,
    loss_value,
)
from .regression import NoiseConfig, RegressionOutcome, fit_scalar, simulate_detector
from .stats import (
    JudgmentTable,
    PreferenceGroup,
    TestReport,
    analyze_table,
    cochran_q,
    group_preference,
    p_value_chi2,
    pairwise_posthoc,
)
from .study import StudyDefinition, StudyStore, StudyTask, build_study

__version__ = "0.1.0"
