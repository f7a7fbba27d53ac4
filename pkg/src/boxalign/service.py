"""HTTP layer for the preference study.

Thin FastAPI wrapper over `StudyStore`: task payloads expose only opaque
candidate ids and boxes (never provenance), judgments are accepted once per
(participant, task), and the export endpoint returns the de-anonymized
judgment table together with the raw records.
"""

from __future__ import annotations

import os

from fastapi import FastAPI
from fastapi.responses import FileResponse, JSONResponse

from .errors import (
    DuplicateSubmissionError,
    InvalidSelectionError,
    StudyCompleteError,
)
from .study import StudyStore, StudyTask

__all__ = ["create_app", "task_payload"]


def task_payload(
    task: StudyTask, display_order: tuple[str, ...], answered: int, total: int
) -> dict:
    """Wire form of a task: image reference, object hint, candidates in
    display order. Contains no provenance information."""
    by_id = {c.candidate_id: c for c in task.candidates}
    return {
        "task_id": task.task_id,
        "image": {
            "file_name": task.file_name,
            "url": f"/images/{task.file_name}",
            "width": task.image_width,
            "height": task.image_height,
        },
        "object": {"category": task.category, "marker": list(task.marker)},
        "candidates": [
            {
                "candidate_id": cid,
                "box": [
                    by_id[cid].box.x_min,
                    by_id[cid].box.y_min,
                    by_id[cid].box.width,
                    by_id[cid].box.height,
                ],
            }
            for cid in display_order
        ],
        "progress": {"answered": answered, "total": total},
    }


def create_app(stores: dict[str, StudyStore]) -> FastAPI:
    """Build the study API over one store per study id."""
    app = FastAPI(title="boxalign preference study")

    def store_or_none(study_id: str) -> StudyStore | None:
        return stores.get(study_id)

    @app.get("/studies/{study_id}/next")
    def next_task(study_id: str, participant: str):
        store = store_or_none(study_id)
        if store is None:
            return JSONResponse({"error": "unknown_study"}, status_code=404)
        answered, total = store.progress(participant)
        try:
            task, display_order = store.next_task(participant)
        except StudyCompleteError:
            return {"complete": True, "answered": answered, "total": total}
        return task_payload(task, display_order, answered, total)

    @app.post("/studies/{study_id}/judgments")
    def submit_judgment(study_id: str, body: dict):
        store = store_or_none(study_id)
        if store is None:
            return JSONResponse({"error": "unknown_study"}, status_code=404)
        try:
            store.submit_judgment(
                participant_id=body.get("participant_id", ""),
                task_id=body.get("task_id", ""),
                selected=body.get("selected", ()),
                display_order=body.get("display_order", ()),
            )
        except InvalidSelectionError as exc:
            return JSONResponse(
                {"error": "invalid_selection", "detail": str(exc)}, status_code=400
            )
        except DuplicateSubmissionError as exc:
            return JSONResponse(
                {"error": "duplicate_submission", "detail": str(exc)}, status_code=409
            )
        answered, total = store.progress(body.get("participant_id", ""))
        return {"status": "ok", "answered": answered, "total": total}

    @app.get("/studies/{study_id}/export")
    def export(study_id: str):
        store = store_or_none(study_id)
        if store is None:
            return JSONResponse({"error": "unknown_study"}, status_code=404)
        result = store.export_judgments()
        return {
            "study_id": study_id,
            "options": list(result.options),
            "rows": [list(r) for r in result.rows],
            "row_keys": [list(k) for k in result.row_keys],
            "records": [
                {
                    "participant_id": r.participant_id,
                    "task_id": r.task_id,
                    "selected": list(r.selected),
                    "display_order": list(r.display_order),
                    "timestamp": r.timestamp,
                }
                for r in result.records
            ],
        }

    @app.get("/images/{file_name}")
    def image(file_name: str):
        for store in stores.values():
            directory = store.definition.images_dir
            if directory is None:
                continue
            path = os.path.join(directory, os.path.basename(file_name))
            if os.path.exists(path):
                return FileResponse(path)
        return JSONResponse({"error": "unknown_image"}, status_code=404)

    return app
