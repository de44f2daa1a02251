"""Local HTTP service over one migration session.

All conversion logic stays server-side; the review console is a thin client
of these endpoints.  Errors surface verbatim: induction conflicts and target
parse errors come back as 422 with the exception message, stale previews as
409.
"""

from __future__ import annotations

import os
from pathlib import Path
from typing import Optional

from fastapi import FastAPI, HTTPException
from fastapi.staticfiles import StaticFiles
from pydantic import BaseModel

from .induction import InductionConflict, UnboundTemplateHole
from .session import (
    MigrationSession,
    NoResidualError,
    StalePreview,
    TargetParseError,
)


class DemonstrationBody(BaseModel):
    error_code: str
    target_text: str


class PreviewRef(BaseModel):
    preview_id: str


def _session_summary(session: MigrationSession) -> dict:
    report = session.report()
    return {
        "session_id": session.session_id,
        "version": session.version,
        "total_segments": report["total_segments"],
        "converted_by_baseline": report["converted_by_baseline"],
        "converted_by_learned": report["converted_by_learned"],
        "residual_segments": report["residual_segments"],
        "residual_errors_by_code": report["residual_errors_by_code"],
    }


def create_app(session: MigrationSession, ui_dir: Optional[str | Path] = None) -> FastAPI:
    app = FastAPI(title="sqlporter session", docs_url=None, redoc_url=None)

    @app.get("/session")
    def get_session() -> dict:
        return _session_summary(session)

    @app.get("/residuals")
    def get_residuals(code: Optional[str] = None) -> dict:
        groups = []
        for error_code, errors in sorted(session.residuals.items()):
            if code is not None and error_code != code:
                continue
            samples = []
            for error in errors:
                try:
                    text = session.segment(error.segment_id).text
                except KeyError:
                    text = ""
                samples.append(
                    {
                        "segment_id": error.segment_id,
                        "message": error.message,
                        "text": text,
                        "span": {
                            "byte_start": error.span.byte_start,
                            "byte_end": error.span.byte_end,
                            "line": error.span.line,
                        },
                    }
                )
            groups.append(
                {
                    "code": error_code,
                    "message": errors[0].message,
                    "count": len(errors),
                    "samples": samples,
                }
            )
        groups.sort(key=lambda group: (-group["count"], group["code"]))
        return {"groups": groups}

    @app.post("/demonstrations")
    def post_demonstration(body: DemonstrationBody) -> dict:
        try:
            preview = session.submit_demonstration(body.error_code, body.target_text)
        except (InductionConflict, UnboundTemplateHole, TargetParseError) as exc:
            raise HTTPException(status_code=422, detail={"error": type(exc).__name__, "message": str(exc)})
        except NoResidualError as exc:
            raise HTTPException(status_code=404, detail={"error": "NoResidualError", "message": str(exc)})
        return preview.to_doc()

    @app.post("/rules/accept")
    def post_accept(body: PreviewRef) -> dict:
        preview = session.previews.get(body.preview_id)
        if preview is None:
            raise HTTPException(status_code=409, detail={"error": "StalePreview", "message": "unknown preview"})
        try:
            session.accept_rule(preview)
        except StalePreview as exc:
            raise HTTPException(status_code=409, detail={"error": "StalePreview", "message": str(exc)})
        return _session_summary(session)

    @app.post("/rules/reject")
    def post_reject(body: PreviewRef) -> dict:
        preview = session.previews.get(body.preview_id)
        if preview is None:
            raise HTTPException(status_code=409, detail={"error": "StalePreview", "message": "unknown preview"})
        try:
            session.reject_rule(preview)
        except StalePreview as exc:
            raise HTTPException(status_code=409, detail={"error": "StalePreview", "message": str(exc)})
        return _session_summary(session)

    @app.get("/report")
    def get_report() -> dict:
        return session.report()

    @app.get("/segments/{segment_id:path}")
    def get_segment(segment_id: str) -> dict:
        try:
            segment = session.segment(segment_id)
        except KeyError:
            raise HTTPException(status_code=404, detail={"error": "NotFound", "message": segment_id})
        conversion = session.outcomes[segment.segment_id]
        return {
            "segment_id": segment.segment_id,
            "source": segment.text,
            "converted": conversion.converted_text,
            "errors": [error.to_doc() for error in conversion.errors],
            "verification": (
                conversion.verification.to_doc() if conversion.verification is not None else None
            ),
        }

    static_dir = ui_dir or os.environ.get("SQLPORTER_UI_DIR")
    if static_dir and Path(static_dir).is_dir():
        app.mount("/ui", StaticFiles(directory=str(static_dir), html=True), name="ui")

    return app
