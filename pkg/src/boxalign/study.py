"""Preference-study definitions, task assembly and durable judgment storage.

A study shows participants one object at a time with several candidate
boxes for it, each produced by a different source (a scaling factor or a
loss variant). Provenance is known only server-side: candidates get opaque
ids from a seeded shuffle at build time and are re-shuffled into a fresh
display order on every serve, so neither id nor position correlates with
which source produced a box.

Judgments are persisted to an append-only JSONL log (one record per line,
fsynced before the submission is acknowledged), which makes the study data
trivially auditable and replayable: restarting the store replays the log.
Serves are logged too, with the permutation that was shown.
"""

from __future__ import annotations

import json
import os
import random
import threading
import time
from dataclasses import dataclass
from pathlib import Path

from .coco_io import DatasetBundle, load_detections, load_ground_truth
from .errors import (
    DuplicateSubmissionError,
    InvalidSelectionError,
    StudyCompleteError,
)
from .geometry import Box, iou
from .stats import JudgmentTable

__all__ = [
    "CandidateBox",
    "StudyTask",
    "StudyDefinition",
    "JudgmentRecord",
    "ExportResult",
    "StudyStore",
    "build_study",
    "load_study_config",
]


@dataclass(frozen=True)
class CandidateBox:
    """One candidate shown to participants. `provenance` never leaves the
    server; participants only ever see the id and the box."""

    candidate_id: str
    box: Box
    provenance: str


@dataclass(frozen=True)
class StudyTask:
    task_id: str
    image_id: int
    file_name: str
    image_width: float
    image_height: float
    category: str
    marker: tuple[float, float]
    candidates: tuple[CandidateBox, ...]


@dataclass(frozen=True)
class StudyDefinition:
    study_id: str
    options: tuple[str, ...]
    tasks: tuple[StudyTask, ...]
    images_dir: str | None = None

    def task_by_id(self, task_id: str) -> StudyTask | None:
        for task in self.tasks:
            if task.task_id == task_id:
                return task
        return None

    def provenance_of(self, candidate_id: str) -> str:
        for task in self.tasks:
            for cand in task.candidates:
                if cand.candidate_id == candidate_id:
                    return cand.provenance
        raise KeyError(candidate_id)


@dataclass(frozen=True)
class JudgmentRecord:
    study_id: str
    participant_id: str
    task_id: str
    selected: tuple[str, ...]
    display_order: tuple[str, ...]
    timestamp: float


def load_study_config(path) -> dict:
    with open(path, "r", encoding="utf-8") as fh:
        return json.load(fh)


def _best_candidate(obj, detections, min_iou: float) -> Box | None:
    best = None
    best_key = (min_iou, float("-inf"))
    for det in detections:
        if det.image_id != obj.image_id or det.category_id != obj.category_id:
            continue
        overlap = iou(det.box, obj.box)
        key = (overlap, det.confidence)
        if overlap >= min_iou and key > best_key:
            best_key = key
            best = det.box
    return best


def build_study(config: dict, base_dir=None) -> StudyDefinition:
    """Assemble a study from a config referencing a COCO bundle and one
    detection file per provenance label.

    Config keys: `study_id`, `ground_truth` (COCO instances path),
    `candidates` (label -> detection-results path), optional `images_dir`,
    `per_size_quota` (max tasks per object-size category), `min_candidate_iou`
    (default 0.3) and `seed` for the candidate-order shuffle.

    A ground-truth object becomes a task only when every provenance label
    contributes a matching detection for it, so each task carries exactly
    one candidate per label.
    """
    base = Path(base_dir) if base_dir is not None else Path(".")
    study_id = config["study_id"]
    bundle = load_ground_truth(base / config["ground_truth"])
    labels = tuple(config["candidates"].keys())
    dets_by_label = {
        label: load_detections(base / path, bundle)
        for label, path in config["candidates"].items()
    }
    min_iou = config.get("min_candidate_iou", 0.3)
    quota = config.get("per_size_quota")
    rng = random.Random(config.get("seed", 0))

    tasks: list[StudyTask] = []
    per_size_counts: dict[str, int] = {}
    for obj in sorted(bundle.ground_truth, key=lambda g: g.annotation_id):
        boxes = {}
        for label in labels:
            best = _best_candidate(obj, dets_by_label[label], min_iou)
            if best is None:
                break
            boxes[label] = best
        if len(boxes) != len(labels):
            continue
        size_key = obj.size_category.value
        if quota is not None and per_size_counts.get(size_key, 0) >= quota:
            continue
        per_size_counts[size_key] = per_size_counts.get(size_key, 0) + 1

        task_id = f"t{len(tasks):04d}"
        shuffled = list(labels)
        rng.shuffle(shuffled)
        candidates = tuple(
            CandidateBox(
                candidate_id=f"{task_id}c{j}", box=boxes[label], provenance=label
            )
            for j, label in enumerate(shuffled)
        )
        image = bundle.image_by_id(obj.image_id)
        tasks.append(
            StudyTask(
                task_id=task_id,
                image_id=obj.image_id,
                file_name=image.file_name,
                image_width=image.size.width,
                image_height=image.size.height,
                category=bundle.categories[obj.category_id],
                marker=obj.box.center,
                candidates=candidates,
            )
        )
    images_dir = config.get("images_dir")
    if images_dir is not None:
        images_dir = str(base / images_dir)
    return StudyDefinition(
        study_id=study_id, options=labels, tasks=tuple(tasks), images_dir=images_dir
    )


@dataclass(frozen=True)
class ExportResult:
    """De-anonymized study data: the binary judgment table plus raw records."""

    options: tuple[str, ...]
    rows: tuple[tuple[int, ...], ...]
    row_keys: tuple[tuple[str, str], ...]
    records: tuple[JudgmentRecord, ...]

    def table(self) -> JudgmentTable:
        return JudgmentTable.from_rows([list(r) for r in self.rows], self.options)


class StudyStore:
    """Serves tasks and durably persists judgments for one study.

    Task reads work over the immutable `StudyDefinition`; all log appends
    and progress updates are serialized through one lock so concurrent
    participants can never interleave a record mid-line. A judgment is
    acknowledged only after its line has been flushed and fsynced, and a
    fresh store on the same log path replays every acknowledged judgment.
    """

    def __init__(self, definition: StudyDefinition, log_path, rng=None):
        self.definition = definition
        self.log_path = str(log_path)
        self._lock = threading.Lock()
        self._rng = rng if rng is not None else random.Random()
        self._answered: dict[str, set[str]] = {}
        self._records: list[JudgmentRecord] = []
        self._replay()
        self._fh = open(self.log_path, "a", encoding="utf-8")

    def _replay(self) -> None:
        if not os.path.exists(self.log_path):
            return
        with open(self.log_path, "r", encoding="utf-8") as fh:
            for line in fh:
                line = line.strip()
                if not line:
                    continue
                event = json.loads(line)
                if event.get("kind") != "judgment":
                    continue
                record = JudgmentRecord(
                    study_id=event["study_id"],
                    participant_id=event["participant_id"],
                    task_id=event["task_id"],
                    selected=tuple(event["selected"]),
                    display_order=tuple(event["display_order"]),
                    timestamp=event["timestamp"],
                )
                self._records.append(record)
                self._answered.setdefault(record.participant_id, set()).add(
                    record.task_id
                )

    def _append(self, event: dict) -> None:
        self._fh.write(json.dumps(event) + "\n")
        self._fh.flush()
        os.fsync(self._fh.fileno())

    def close(self) -> None:
        self._fh.close()

    def progress(self, participant_id: str) -> tuple[int, int]:
        answered = self._answered.get(participant_id, set())
        return len(answered), len(self.definition.tasks)

    def next_task(self, participant_id: str) -> tuple[StudyTask, tuple[str, ...]]:
        """Return the participant's next unanswered task with a fresh
        display permutation (recorded in the log).

        Raises:
            StudyCompleteError: Every task has been answered.
        """
        with self._lock:
            answered = self._answered.get(participant_id, set())
            task = next(
                (t for t in self.definition.tasks if t.task_id not in answered), None
            )
            if task is None:
                raise StudyCompleteError(
                    f"participant {participant_id!r} has answered all "
                    f"{len(self.definition.tasks)} tasks"
                )
            order = [c.candidate_id for c in task.candidates]
            self._rng.shuffle(order)
            display_order = tuple(order)
            self._append(
                {
                    "kind": "serve",
                    "study_id": self.definition.study_id,
                    "participant_id": participant_id,
                    "task_id": task.task_id,
                    "display_order": list(display_order),
                    "timestamp": time.time(),
                }
            )
            return task, display_order

    def submit_judgment(
        self,
        participant_id: str,
        task_id: str,
        selected,
        display_order=(),
    ) -> JudgmentRecord:
        """Validate and durably record one judgment.

        Raises:
            InvalidSelectionError: Unknown task, empty selection, or a
                selection naming candidates outside the task.
            DuplicateSubmissionError: This participant already answered
                this task.
        """
        task = self.definition.task_by_id(task_id)
        if task is None:
            raise InvalidSelectionError(f"unknown task {task_id!r}")
        chosen = tuple(dict.fromkeys(selected))
        if not chosen:
            raise InvalidSelectionError("selection must name at least one candidate")
        valid_ids = {c.candidate_id for c in task.candidates}
        unknown = [c for c in chosen if c not in valid_ids]
        if unknown:
            raise InvalidSelectionError(
                f"selection names candidates not in task {task_id!r}: {unknown}"
            )
        with self._lock:
            if task_id in self._answered.get(participant_id, set()):
                raise DuplicateSubmissionError(
                    f"participant {participant_id!r} already answered {task_id!r}"
                )
            record = JudgmentRecord(
                study_id=self.definition.study_id,
                participant_id=participant_id,
                task_id=task_id,
                selected=chosen,
                display_order=tuple(display_order),
                timestamp=time.time(),
            )
            self._append(
                {
                    "kind": "judgment",
                    "study_id": record.study_id,
                    "participant_id": record.participant_id,
                    "task_id": record.task_id,
                    "selected": list(record.selected),
                    "display_order": list(record.display_order),
                    "timestamp": record.timestamp,
                }
            )
            self._records.append(record)
            self._answered.setdefault(participant_id, set()).add(task_id)
            return record

    def export_judgments(self) -> ExportResult:
        """De-anonymize all recorded judgments into the binary option table
        consumed by the preference statistics."""
        with self._lock:
            records = tuple(
                sorted(self._records, key=lambda r: (r.participant_id, r.task_id))
            )
        options = self.definition.options
        rows = []
        keys = []
        for record in records:
            labels = {
                self.definition.provenance_of(cid) for cid in record.selected
            }
            rows.append(tuple(1 if label in labels else 0 for label in options))
            keys.append((record.participant_id, record.task_id))
        return ExportResult(
            options=options,
            rows=tuple(rows),
            row_keys=tuple(keys),
            records=records,
        )
