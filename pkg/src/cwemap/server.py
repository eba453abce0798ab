"""HTTP API over the annotation workflow, plus static hosting for the UI.

Version conflicts answer 409, wrong-actor submissions 403, invalid
decisions 400. Annotator identity is a plain id (authentication is a
deployment concern).
"""

from __future__ import annotations

from pathlib import Path

from fastapi import FastAPI, HTTPException, Query, Response
from fastapi.responses import PlainTextResponse
from fastapi.staticfiles import StaticFiles
from pydantic import BaseModel

from .annotate import Decision, DecisionAction, Workflow
from .corpus import dump_dataset_csv, dump_dataset_jsonl, parse_label
from .errors import LabelError, StaleVersionError, WorkflowError, WrongActorError


class DecisionRequest(BaseModel):
    annotator: str
    action: str
    labels: str | None = None
    task_version: int


def create_app(workflow: Workflow, static_dir: str | Path | None = None) -> FastAPI:
    app = FastAPI(title="cwemap annotation API")

    @app.get("/api/tasks/next")
    def next_task(annotator: str = Query(...)):
        try:
            task = workflow.next_task(annotator)
        except WorkflowError as exc:
            raise HTTPException(status_code=400, detail=str(exc))
        if task is None:
            return Response(status_code=204)
        return task.to_payload()

    @app.post("/api/tasks/{cve_id}/decision")
    def submit_decision(cve_id: str, req: DecisionRequest):
        if cve_id not in workflow.tasks:
            raise HTTPException(status_code=404, detail=f"unknown task {cve_id}")
        try:
            action = DecisionAction(req.action)
        except ValueError:
            raise HTTPException(status_code=400, detail=f"unknown action {req.action!r}")
        try:
            labels = parse_label(req.labels) if req.labels else None
            decision = Decision(annotator=req.annotator, action=action, labels=labels)
            task = workflow.submit(cve_id, decision, task_version=req.task_version)
        except WrongActorError as exc:
            raise HTTPException(status_code=403, detail=str(exc))
        except StaleVersionError as exc:
            raise HTTPException(status_code=409, detail=str(exc))
        except (WorkflowError, LabelError) as exc:
            raise HTTPException(status_code=400, detail=str(exc))
        return task.to_payload()

    @app.get("/api/dataset/stats")
    def dataset_stats():
        return workflow.stats()

    @app.get("/api/dataset/export")
    def dataset_export(format: str = Query("csv")):
        rows = workflow.export_final()
        if format == "csv":
            return PlainTextResponse(dump_dataset_csv(rows), media_type="text/csv")
        if format == "jsonl":
            return PlainTextResponse(dump_dataset_jsonl(rows),
                                     media_type="application/x-ndjson")
        raise HTTPException(status_code=400, detail=f"unknown format {format!r}")

    @app.get("/api/catalog")
    def catalog():
        return [
            {
                "rank": e.rank,
                "cwe_id": e.cwe_id,
                "name": e.name,
                "description": e.description,
                "extended_description": e.extended_description,
                "cvss_score": e.cvss_score,
            }
            for e in workflow.catalog
        ]

    if static_dir is not None and Path(static_dir).is_dir():
        app.mount("/", StaticFiles(directory=str(static_dir), html=True), name="ui")

    return app
