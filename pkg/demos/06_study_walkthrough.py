#!/usr/bin/env python3
"""End-to-end study walkthrough, no HTTP involved.

Builds a four-option study (three loss variants plus a fixed scaling) from
a COCO bundle and per-option detection files, runs scripted participants
against the judgment store, and feeds the export into the statistics.
Everything lands in demo_output/study/. The same study definition can be
served over HTTP with:

    boxalign serve-study --config demo_output/study/study.json \
        --data-dir demo_output/study/logs
"""

import json
import math
import os
import random

from boxalign.stats import analyze_table
from boxalign.study import StudyStore, build_study

base = "demo_output/study"
os.makedirs(base, exist_ok=True)

# Ground truth: nine objects across nine images.
images = [
    {"id": i, "file_name": f"img{i}.png", "width": 640, "height": 480}
    for i in range(1, 10)
]
annotations = [
    {
        "id": 100 + i,
        "image_id": i,
        "category_id": 1 + i % 3,
        "bbox": [120 + 10 * i, 90, 80, 60],
    }
    for i in range(1, 10)
]
gt = {
    "images": images,
    "annotations": annotations,
    "categories": [
        {"id": 1, "name": "cat"},
        {"id": 2, "name": "dog"},
        {"id": 3, "name": "bird"},
    ],
}
with open(f"{base}/gt.json", "w") as fh:
    json.dump(gt, fh)

# One candidate detection file per provenance label: each variant scales
# the ground-truth area by its characteristic factor.
labels = {"alpha=1": 1.0, "alpha=10": 1.21, "alpha=100": 1.41, "scale-1.5": 1.5}
for label, factor in labels.items():
    lin = math.sqrt(factor)
    records = []
    for a in annotations:
        x, y, w, h = a["bbox"]
        records.append(
            {
                "image_id": a["image_id"],
                "category_id": a["category_id"],
                "bbox": [x - (w * lin - w) / 2, y - (h * lin - h) / 2, w * lin, h * lin],
                "score": 0.9,
            }
        )
    with open(f"{base}/dets_{label.replace('=', '_')}.json", "w") as fh:
        json.dump(records, fh)

config = {
    "study_id": "walkthrough",
    "ground_truth": "gt.json",
    "candidates": {
        label: f"dets_{label.replace('=', '_')}.json" for label in labels
    },
    "seed": 3,
}
with open(f"{base}/study.json", "w") as fh:
    json.dump(config, fh, indent=2)

definition = build_study(config, base_dir=base)
print(f"study '{definition.study_id}': {len(definition.tasks)} tasks, "
      f"options {list(definition.options)}")

# Scripted participants with a mild taste for moderately enlarged boxes.
os.makedirs(f"{base}/logs", exist_ok=True)
log_path = f"{base}/logs/walkthrough.jsonl"
if os.path.exists(log_path):
    os.remove(log_path)
store = StudyStore(definition, log_path, rng=random.Random(11))
rng = random.Random(4)
weights = {"alpha=1": 0.25, "alpha=10": 0.40, "alpha=100": 0.20, "scale-1.5": 0.15}

for participant in (f"p{i:02d}" for i in range(12)):
    while True:
        try:
            task, order = store.next_task(participant)
        except Exception:
            break
        by_label = {c.provenance: c.candidate_id for c in task.candidates}
        pick = rng.choices(list(weights), weights=list(weights.values()))[0]
        chosen = [by_label[pick]]
        if rng.random() < 0.15:  # occasional multi-select
            other = rng.choice([l for l in weights if l != pick])
            chosen.append(by_label[other])
        store.submit_judgment(participant, task.task_id, chosen, order)

export = store.export_judgments()
store.close()
print(f"collected {len(export.records)} judgments "
      f"(log: {log_path})")

table = export.table()
report = analyze_table(table)
n = table.matrix.shape[0]
print(f"\nCochran's Q = {report.statistic:.2f} (df {report.degrees_of_freedom}), "
      f"p = {report.p_value:.3g}")
for label, col in zip(table.options, table.matrix.sum(axis=0)):
    print(f"  {label:>10} selected in {100.0 * col / n:5.1f}% of judgments")
print("\nanalyze the log again any time with:")
print(f"  boxalign analyze-study --judgments {log_path} "
      f"--study-config {base}/study.json")
