"""Command-line entry point for the whole pipeline.

Subcommands: `scale` rescales detection boxes, `eval` computes AP reports,
`size-hist` censuses large vs small predictions per IoU interval,
`loss-curve` tabulates the asymmetric loss and its gradient, `simulate`
runs the noisy-regression sweep, `analyze-study` runs the preference
statistics, and `serve-study` starts the judgment-collection HTTP service.

Reports are emitted as JSON documents and flat CSV; plot rendering is left
to external tools. Every subcommand is deterministic given its inputs,
flags and --seed. Exit code 0 means success; errors are reported with the
offending file and record context and exit non-zero.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import sys

import numpy as np

from .coco_io import Detection, load_detections, load_ground_truth, write_detections
from .errors import BoxalignError, DegenerateTableError
from .evaluation import (
    DEFAULT_THRESHOLDS,
    ApReport,
    SizeRatioHistogram,
    evaluate,
    size_ratio_histogram,
)
from .geometry import scale_box
from .losses import AsymmetricLossParams, loss_gradient, loss_value
from .regression import NoiseConfig, simulate_detector
from .stats import (
    SCALING_OPTIONS,
    JudgmentTable,
    analyze_table,
    group_percentages,
)
from .study import StudyStore, build_study, load_study_config

__all__ = ["main"]


def _parse_float_list(text: str) -> list[float]:
    return [float(part) for part in text.split(",") if part.strip()]


def _parse_noise(text: str, seed: int) -> NoiseConfig:
    try:
        kind, scale = text.split(":")
        return NoiseConfig(distribution=kind, scale=float(scale), seed=seed)
    except ValueError as exc:
        raise BoxalignError(
            f"--noise must look like 'uniform:0.25' or 'gaussian:0.1', got {text!r}"
        ) from exc


def _parse_range(text: str) -> np.ndarray:
    try:
        lo, hi, count = text.split(":")
        return np.linspace(float(lo), float(hi), int(count))
    except ValueError as exc:
        raise BoxalignError(
            f"--x-range must look like 'min:max:count', got {text!r}"
        ) from exc


def _emit(text: str, out_path: str | None) -> None:
    if out_path is None:
        sys.stdout.write(text)
        if not text.endswith("\n"):
            sys.stdout.write("\n")
    else:
        with open(out_path, "w", encoding="utf-8") as fh:
            fh.write(text)


def _report_to_dict(report: ApReport) -> dict:
    return {
        "ap": report.ap,
        "ap50": report.ap50,
        "per_threshold": {f"{t:g}": v for t, v in report.per_threshold.items()},
        "per_size": {cat.value: v for cat, v in report.per_size.items()},
    }


def _histogram_to_dict(hist: SizeRatioHistogram) -> dict:
    def rows(bins):
        return [
            {
                "iou_low": hist.bin_edges[i],
                "iou_high": hist.bin_edges[i + 1],
                "larger": b.larger,
                "smaller": b.smaller,
                "equal": b.equal,
            }
            for i, b in enumerate(bins)
        ]

    return {
        "bins": rows(hist.bins),
        "per_size": {cat.value: rows(bins) for cat, bins in hist.per_size.items()},
        "excluded_unmatched": hist.excluded,
    }


def _histogram_to_csv(hist: SizeRatioHistogram) -> str:
    buf = io.StringIO()
    writer = csv.writer(buf)
    writer.writerow(
        ["size_category", "iou_low", "iou_high", "larger", "smaller", "equal"]
    )
    groups = [("all", hist.bins)] + [
        (cat.value, bins) for cat, bins in hist.per_size.items()
    ]
    for name, bins in groups:
        for i, b in enumerate(bins):
            writer.writerow(
                [name, hist.bin_edges[i], hist.bin_edges[i + 1], b.larger, b.smaller, b.equal]
            )
    return buf.getvalue()


def cmd_scale(args) -> int:
    bundle = load_ground_truth(args.gt)
    dets = load_detections(args.det, bundle)
    scaled = []
    for i, det in enumerate(dets):
        img = bundle.image_by_id(det.image_id).size
        try:
            box = scale_box(det.box, args.factor, img)
        except BoxalignError as exc:
            raise BoxalignError(f"{args.det}: detection[{i}]: {exc}") from exc
        scaled.append(
            Detection(
                image_id=det.image_id,
                category_id=det.category_id,
                box=box,
                confidence=det.confidence,
            )
        )
    write_detections(scaled, args.out)
    return 0


def cmd_eval(args) -> int:
    bundle = load_ground_truth(args.gt)
    dets = load_detections(args.det, bundle)
    thresholds = (
        tuple(_parse_float_list(args.thresholds))
        if args.thresholds
        else DEFAULT_THRESHOLDS
    )
    report = evaluate(dets, bundle, thresholds)
    _emit(json.dumps(_report_to_dict(report), indent=2), args.out)
    if args.csv:
        buf = io.StringIO()
        writer = csv.writer(buf)
        writer.writerow(["threshold", "ap"])
        for t, v in report.per_threshold.items():
            writer.writerow([t, v])
        with open(args.csv, "w", encoding="utf-8") as fh:
            fh.write(buf.getvalue())
    return 0


def cmd_size_hist(args) -> int:
    bundle = load_ground_truth(args.gt)
    dets = load_detections(args.det, bundle)
    hist = size_ratio_histogram(dets, bundle)
    if args.csv:
        with open(args.csv, "w", encoding="utf-8") as fh:
            fh.write(_histogram_to_csv(hist))
    _emit(json.dumps(_histogram_to_dict(hist), indent=2), args.out)
    return 0


def cmd_loss_curve(args) -> int:
    alphas = _parse_float_list(args.alpha)
    xs = _parse_range(args.x_range)
    buf = io.StringIO()
    writer = csv.writer(buf)
    writer.writerow(["alpha", "beta", "x", "value", "gradient", "neg_to_pos_ratio"])
    for alpha in alphas:
        params = AsymmetricLossParams(alpha=alpha, beta=args.beta)
        for x in xs:
            x = float(x)
            value = loss_value(x, params)
            gradient = loss_gradient(x, params)
            ratio = "" if x == 0.0 else loss_value(-x, params) / value
            writer.writerow([alpha, args.beta, x, value, gradient, ratio])
    _emit(buf.getvalue(), args.out)
    return 0


def cmd_simulate(args) -> int:
    bundle = load_ground_truth(args.gt)
    noise = _parse_noise(args.noise, args.seed)
    buf = io.StringIO()
    writer = csv.writer(buf)
    writer.writerow(["alpha", "fraction_larger", "ap", "mean_scale_ratio"])
    for alpha in _parse_float_list(args.alpha):
        params = AsymmetricLossParams(alpha=alpha, beta=args.beta)
        outcome = simulate_detector(
            bundle,
            noise,
            params,
            lr=args.lr,
            iters=args.iters,
            samples_per_object=args.samples,
        )
        writer.writerow(
            [
                alpha,
                outcome.fraction_larger,
                outcome.ap_report.ap,
                outcome.mean_scale_ratio,
            ]
        )
    _emit(buf.getvalue(), args.out)
    return 0


def _load_judgment_table(args) -> JudgmentTable:
    path = args.judgments
    try:
        return _load_judgment_table_inner(args)
    except ValueError as exc:
        raise BoxalignError(f"{path}: {exc}") from exc


def _load_judgment_table_inner(args) -> JudgmentTable:
    path = args.judgments
    if path.endswith(".csv"):
        return JudgmentTable.from_csv(path)
    if path.endswith(".jsonl"):
        if not args.study_config:
            raise BoxalignError(
                "analyzing a raw judgment log requires --study-config to "
                "de-anonymize candidates"
            )
        config = load_study_config(args.study_config)
        import os
        import tempfile

        definition = build_study(config, base_dir=os.path.dirname(args.study_config))
        with tempfile.TemporaryDirectory() as tmp:
            # Replay the log through a throwaway store; the store never
            # writes to the original log.
            import shutil

            replay_path = os.path.join(tmp, "replay.jsonl")
            shutil.copyfile(path, replay_path)
            store = StudyStore(definition, replay_path)
            try:
                return store.export_judgments().table()
            finally:
                store.close()
    with open(path, "r", encoding="utf-8") as fh:
        doc = json.load(fh)
    if not isinstance(doc, dict) or "rows" not in doc or "options" not in doc:
        raise BoxalignError(
            f"{path}: expected an export document with 'options' and 'rows'"
        )
    return JudgmentTable.from_rows(doc["rows"], doc["options"])


def cmd_analyze_study(args) -> int:
    table = _load_judgment_table(args)
    try:
        report = analyze_table(table)
        q_doc = {
            "statistic": report.statistic,
            "degrees_of_freedom": report.degrees_of_freedom,
            "p_value": report.p_value,
        }
        pairwise_doc = {f"{a}|{b}": p for (a, b), p in report.pairwise.items()}
    except DegenerateTableError:
        # Every row constant: all options judged identically, no evidence of
        # any difference. Report the null outcome instead of failing.
        k = table.matrix.shape[1]
        q_doc = {"statistic": 0.0, "degrees_of_freedom": k - 1, "p_value": 1.0}
        pairwise_doc = {
            f"{a}|{b}": 1.0
            for i, a in enumerate(table.options)
            for b in table.options[i + 1 :]
        }
    n = table.matrix.shape[0]
    col = table.matrix.sum(axis=0)
    total_selections = int(col.sum())

    doc: dict = {
        "n_judgments": n,
        "options": list(table.options),
        "cochran_q": q_doc,
        "pairwise_bonferroni": pairwise_doc,
        "selection_counts": {
            label: int(c) for label, c in zip(table.options, col)
        },
        "percent_of_judgments": {
            label: 100.0 * int(c) / n for label, c in zip(table.options, col)
        },
        "percent_of_selections": {
            label: 100.0 * int(c) / total_selections
            for label, c in zip(table.options, col)
        },
    }

    scaling_labels = _scaling_option_map(table.options)
    if scaling_labels is not None:
        selections = []
        for row in table.matrix:
            selections.append(
                {scaling_labels[j] for j, cell in enumerate(row) if cell == 1}
            )
        doc["preference_groups"] = {
            group.value: pct for group, pct in group_percentages(selections).items()
        }

    _emit(json.dumps(doc, indent=2), args.out)
    if args.out is not None:
        _print_summary(doc)
    return 0


def _scaling_option_map(options) -> dict[int, float] | None:
    """Map column index -> scaling factor when the option labels are
    exactly the five scaling-study factors."""
    try:
        values = [float(label) for label in options]
    except ValueError:
        return None
    if sorted(values) != sorted(SCALING_OPTIONS):
        return None
    return dict(enumerate(values))


def _print_summary(doc: dict) -> None:
    q = doc["cochran_q"]
    print(
        f"Cochran's Q = {q['statistic']:.3f} "
        f"(df {q['degrees_of_freedom']}), p = {q['p_value']:.4g}"
    )
    for label in doc["options"]:
        pct = doc["percent_of_judgments"][label]
        print(f"  chosen in {pct:5.1f}% of judgments: {label}")
    if "preference_groups" in doc:
        print("preference groups:")
        for group, pct in doc["preference_groups"].items():
            print(f"  {group}: {pct:.1f}%")


def cmd_serve_study(args) -> int:
    import os

    import uvicorn

    from .service import create_app

    os.makedirs(args.data_dir, exist_ok=True)
    stores = {}
    for config_path in args.config:
        config = load_study_config(config_path)
        definition = build_study(config, base_dir=os.path.dirname(config_path))
        log_path = os.path.join(args.data_dir, f"{definition.study_id}.jsonl")
        stores[definition.study_id] = StudyStore(definition, log_path)
    app = create_app(stores)
    uvicorn.run(app, host=args.host, port=args.port, log_level="warning")
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="boxalign",
        description="Bounding-box scaling, AP evaluation, asymmetric-loss "
        "tooling and preference-study analysis.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("scale", help="rescale detection box areas and clip")
    p.add_argument("--gt", required=True, help="COCO instances file")
    p.add_argument("--det", required=True, help="COCO results file")
    p.add_argument("--factor", type=float, required=True, help="area multiplier")
    p.add_argument("--out", required=True, help="output detections path")
    p.set_defaults(func=cmd_scale)

    p = sub.add_parser("eval", help="AP report for a detection file")
    p.add_argument("--gt", required=True)
    p.add_argument("--det", required=True)
    p.add_argument("--thresholds", help="comma-separated IoU thresholds")
    p.add_argument("--out", help="JSON report path (default: stdout)")
    p.add_argument("--csv", help="optional per-threshold CSV path")
    p.set_defaults(func=cmd_eval)

    p = sub.add_parser("size-hist", help="large-vs-small census per IoU bin")
    p.add_argument("--gt", required=True)
    p.add_argument("--det", required=True)
    p.add_argument("--out", help="JSON path (default: stdout)")
    p.add_argument("--csv", help="flat CSV path")
    p.set_defaults(func=cmd_size_hist)

    p = sub.add_parser("loss-curve", help="loss/gradient table for plotting")
    p.add_argument("--alpha", required=True, help="comma-separated alpha values")
    p.add_argument("--beta", type=float, default=1.0)
    p.add_argument("--x-range", default="-3:3:121", help="min:max:count (use --x-range=-3:3:121 for negative bounds)")
    p.add_argument("--out", help="CSV path (default: stdout)")
    p.set_defaults(func=cmd_loss_curve)

    p = sub.add_parser("simulate", help="noisy-regression alpha sweep")
    p.add_argument("--gt", required=True)
    p.add_argument("--alpha", required=True, help="comma-separated alpha values")
    p.add_argument("--beta", type=float, default=1.0)
    p.add_argument("--noise", default="uniform:0.25", help="uniform:H or gaussian:S")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--samples", type=int, default=400, help="noise draws per object")
    p.add_argument("--lr", type=float, default=0.1)
    p.add_argument("--iters", type=int, default=20000)
    p.add_argument("--out", help="CSV path (default: stdout)")
    p.set_defaults(func=cmd_simulate)

    p = sub.add_parser("analyze-study", help="Cochran's Q + post-hoc analysis")
    p.add_argument(
        "--judgments",
        required=True,
        help="judgment table CSV, export JSON, or raw study log JSONL",
    )
    p.add_argument("--study-config", help="study config (needed for JSONL logs)")
    p.add_argument("--out", help="JSON report path (default: stdout)")
    p.set_defaults(func=cmd_analyze_study)

    p = sub.add_parser("serve-study", help="run the judgment-collection service")
    p.add_argument("--config", action="append", required=True, help="study config JSON")
    p.add_argument("--data-dir", required=True, help="judgment log directory")
    p.add_argument("--host", default="127.0.0.1")
    p.add_argument("--port", type=int, default=8700)
    p.set_defaults(func=cmd_serve_study)

    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except BoxalignError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except OSError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
