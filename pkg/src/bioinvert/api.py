"""HTTP carrier for the workflow: a thin adapter over the project library.

Every mutating endpoint routes through the event log; no endpoint computes
domain math of its own. Responses carry the ``X-FBCE-Version: 1`` header and
errors use the envelope {code, message, path}. Optimistic concurrency for
the designer UI: a mutating request may carry the event-log head it saw in
the ``X-FBCE-Head`` header; a mismatch returns 409 and the client reloads.
"""

from __future__ import annotations

import enum
import threading
import uuid
from pathlib import Path

from fastapi import Body, FastAPI, Request, Response
from fastapi.responses import JSONResponse
from fastapi.staticfiles import StaticFiles

from . import project as proj
from .decision import G1Judgment, g1_weights
from .errors import BioinvertError, SchemaError
from .frames import parse_frame, serialize_frame, validate_frame

API_VERSION = "1"

_STATUS_BY_CODE = {
    "SCHEMA_ERROR": 422,
    "MISSING_MANUAL_SCORE": 422,
    "MISSING_VERDICT": 422,
    "MISSING_DIMENSION": 422,
    "NO_ALTERNATIVES": 422,
    "KB_EMPTY": 422,
    "BAD_RATIO": 422,
    "LENGTH_MISMATCH": 422,
    "K_OUT_OF_RANGE": 422,
    "INSUFFICIENT_CORPUS": 422,
    "EMPTY_DOCUMENT": 422,
    "NO_DISCRIMINATION": 422,
    "STAGE_ORDER_VIOLATION": 409,
    "VERSION_MISMATCH": 409,
    "CONFLICT": 409,
    "IO_ERROR": 404,
    "NOT_FOUND": 404,
}


class _HeadConflict(BioinvertError):
    code = "CONFLICT"


class _NotFound(BioinvertError):
    code = "NOT_FOUND"


class _JobState(enum.Enum):
    RUNNING = "running"
    DONE = "done"
    FAILED = "failed"
    CANCELLED = "cancelled"


class _Job:
    def __init__(self):
        self.id = uuid.uuid4().hex
        self.state = _JobState.RUNNING
        self.report: dict | None = None
        self.error: dict | None = None
        self.cancel_requested = False


def create_app(project_root: str | Path, static_dir: str | Path | None = None) -> FastAPI:
    root = Path(project_root)
    root.mkdir(parents=True, exist_ok=True)
    app = FastAPI(title="bioinvert workbench", version=API_VERSION)
    jobs: dict[str, _Job] = {}
    jobs_lock = threading.Lock()

    # ------------------------------------------------------------------
    # plumbing
    # ------------------------------------------------------------------

    @app.middleware("http")
    async def _version_header(request: Request, call_next):
        response = await call_next(request)
        response.headers["X-FBCE-Version"] = API_VERSION
        return response

    @app.exception_handler(BioinvertError)
    async def _error_envelope(request: Request, exc: BioinvertError):
        status = _STATUS_BY_CODE.get(exc.code, 400)
        path = getattr(exc, "path", None) or request.url.path
        body = {"code": exc.code, "message": exc.message, "path": path}
        if exc.details:
            body["details"] = {k: v for k, v in exc.details.items() if k != "path"}
        return JSONResponse(status_code=status, content=body)

    @app.exception_handler(ValueError)
    async def _value_error(request: Request, exc: ValueError):
        return JSONResponse(
            status_code=422, content={"code": "INVALID_INPUT", "message": str(exc), "path": request.url.path}
        )

    @app.exception_handler(KeyError)
    async def _key_error(request: Request, exc: KeyError):
        return JSONResponse(
            status_code=404, content={"code": "NOT_FOUND", "message": str(exc), "path": request.url.path}
        )

    def _load(pid: str) -> proj.Project:
        try:
            return proj.load(root, pid)
        except proj.IoError:
            raise _NotFound(f"no project {pid!r}")

    def _mutate(pid: str, request: Request, op: str, params: dict) -> dict:
        with proj.project_lock(root, pid):
            project = _load(pid)
            head = request.headers.get("X-FBCE-Head")
            if head is not None and int(head) != len(project.events):
                raise _HeadConflict(
                    f"event-log head moved: client saw {head}, server at {len(project.events)}"
                )
            report = proj.record(project, op, params)
            proj.persist(project, root)
        return report

    def _summary(project: proj.Project) -> dict:
        return {
            "id": project.id,
            "name": project.name,
            "stages": project.workflow_state(),
            "head": len(project.events),
            "problem": proj._problem_to_doc(project.problem),
            "has_kb": project.kb_doc is not None,
            "judgment": project.judgment_doc,
            "frames": sorted(project.frames),
            "batches": len(project.batches),
        }

    # ------------------------------------------------------------------
    # projects CRUD
    # ------------------------------------------------------------------

    @app.get("/api/projects")
    def list_projects():
        return [_summary(_load(pid)) for pid in proj.list_projects(root)]

    @app.post("/api/projects", status_code=201)
    def create_project(payload: dict = Body(...)):
        pid = payload["id"]
        if pid in proj.list_projects(root):
            raise _HeadConflict(f"project {pid!r} already exists")
        project = proj.Project(id=pid, name=payload.get("name", pid))
        proj.persist(project, root)
        return _summary(project)

    @app.get("/api/projects/{pid}")
    def get_project(pid: str):
        return _summary(_load(pid))

    @app.delete("/api/projects/{pid}", status_code=204)
    def delete_project(pid: str):
        import shutil

        directory = root / pid
        if not directory.is_dir():
            raise _NotFound(f"no project {pid!r}")
        shutil.rmtree(directory)
        return Response(status_code=204)

    @app.post("/api/projects/{pid}/problem")
    def set_problem(pid: str, request: Request, payload: dict = Body(...)):
        return _mutate(pid, request, "set_problem", payload)

    @app.post("/api/projects/{pid}/kb")
    def set_kb(pid: str, request: Request, payload: dict = Body(...)):
        return _mutate(pid, request, "set_kb", {"kb": payload["kb"]})

    # ------------------------------------------------------------------
    # stages
    # ------------------------------------------------------------------

    def _run_stage_sync(pid: str, request: Request, stage: str, params: dict) -> dict:
        params = dict(params)
        params["stage"] = proj.Stage(stage.capitalize()).value
        return _mutate(pid, request, "run_stage", params)

    @app.post("/api/projects/{pid}/stages/{stage}/run")
    def run_stage(pid: str, stage: str, request: Request, payload: dict = Body(default={}), background: bool = False):
        if not background:
            return _run_stage_sync(pid, request, stage, payload)
        job = _Job()
        with jobs_lock:
            jobs[job.id] = job

        def worker():
            try:
                if job.cancel_requested:
                    job.state = _JobState.CANCELLED
                    return
                job.report = _run_stage_sync(pid, request, stage, payload)
                job.state = _JobState.DONE
            except BioinvertError as exc:
                job.error = exc.to_dict()
                job.state = _JobState.FAILED
            except Exception as exc:  # pragma: no cover - defensive
                job.error = {"code": "ERROR", "message": str(exc)}
                job.state = _JobState.FAILED

        threading.Thread(target=worker, daemon=True).start()
        return {"job_id": job.id, "state": job.state.value}

    @app.get("/api/projects/{pid}/jobs/{job_id}")
    def job_status(pid: str, job_id: str):
        job = jobs.get(job_id)
        if job is None:
            raise _NotFound(f"no job {job_id!r}")
        return {"job_id": job.id, "state": job.state.value, "report": job.report, "error": job.error}

    @app.post("/api/projects/{pid}/jobs/{job_id}/cancel")
    def job_cancel(pid: str, job_id: str):
        job = jobs.get(job_id)
        if job is None:
            raise _NotFound(f"no job {job_id!r}")
        job.cancel_requested = True
        return {"job_id": job.id, "state": job.state.value}

    # ------------------------------------------------------------------
    # review
    # ------------------------------------------------------------------

    def _batch_view(batch) -> dict:
        return proj._batch_to_doc(batch)

    @app.get("/api/projects/{pid}/review/batches")
    def list_batches(pid: str):
        project = _load(pid)
        return [
            {
                "batch_no": b.batch_no,
                "size": len(b.items),
                "audit_sample": list(b.audit_sample),
                "status": b.status.value,
                "rounds": b.rounds,
            }
            for b in project.batches
        ]

    @app.get("/api/projects/{pid}/review/batches/{batch_no}")
    def get_batch(pid: str, batch_no: int):
        project = _load(pid)
        return _batch_view(proj._find_batch(project, batch_no))

    @app.post("/api/projects/{pid}/review/batches/{batch_no}/verdicts")
    def post_verdicts(pid: str, batch_no: int, request: Request, payload: dict = Body(...)):
        return _mutate(pid, request, "verdicts", {"batch_no": batch_no, "verdicts": payload["verdicts"]})

    @app.post("/api/projects/{pid}/review/step")
    def review_step(pid: str, request: Request, payload: dict = Body(...)):
        return _mutate(pid, request, "review_step", payload)

    # ------------------------------------------------------------------
    # frames
    # ------------------------------------------------------------------

    @app.get("/api/projects/{pid}/frames")
    def list_frames(pid: str):
        project = _load(pid)
        return [serialize_frame(f) for f in project.frames.values()]

    @app.get("/api/projects/{pid}/frames/{fid}")
    def get_frame(pid: str, fid: str):
        project = _load(pid)
        if fid not in project.frames:
            raise _NotFound(f"no frame {fid!r}")
        return serialize_frame(project.frames[fid])

    @app.put("/api/projects/{pid}/frames/{fid}")
    def put_frame(pid: str, fid: str, request: Request, payload: dict = Body(...)):
        if payload.get("id") != fid:
            raise SchemaError("frame id must match the URL", path="/id")
        return _mutate(pid, request, "put_frame", {"frame": payload})

    @app.post("/api/frames/validate")
    def validate_frame_doc(payload: dict = Body(...)):
        frame = parse_frame(payload)
        issues = validate_frame(frame)
        return {"violations": [{"code": i.code, "path": i.path, "message": i.message} for i in issues]}

    # ------------------------------------------------------------------
    # inversion / screening / decision / clusters
    # ------------------------------------------------------------------

    @app.post("/api/projects/{pid}/inversion")
    def run_inversion(pid: str, request: Request, payload: dict = Body(default={})):
        return _run_stage_sync(pid, request, "inverted", payload)

    @app.get("/api/projects/{pid}/inversion")
    def get_inversions(pid: str):
        project = _load(pid)
        return [proj._inversion_to_doc(r) for r in project.inversions]

    @app.post("/api/projects/{pid}/screening")
    def run_screening(pid: str, request: Request, payload: dict = Body(...)):
        return _run_stage_sync(pid, request, "screened", payload)

    @app.post("/api/decision/g1-preview")
    def g1_preview(payload: dict = Body(...)):
        judgment = G1Judgment(tuple(payload["order"]), tuple(payload["ratios"]))
        return {"weights": g1_weights(judgment)}

    @app.post("/api/projects/{pid}/decision/g1-judgment")
    def post_judgment(pid: str, request: Request, payload: dict = Body(...)):
        return _mutate(pid, request, "g1_judgment", payload)

    @app.post("/api/projects/{pid}/decision/run")
    def run_decision(pid: str, request: Request, payload: dict = Body(...)):
        return _run_stage_sync(pid, request, "ranked", payload)

    @app.get("/api/projects/{pid}/decision/result")
    def decision_result(pid: str):
        project = _load(pid)
        if project.decision_doc is None:
            raise _NotFound("no decision result yet")
        return project.decision_doc

    @app.post("/api/projects/{pid}/clusters/run")
    def run_clusters(pid: str, request: Request, payload: dict = Body(...)):
        return _run_stage_sync(pid, request, "clustered", payload)

    @app.get("/api/projects/{pid}/clusters")
    def get_clusters(pid: str):
        project = _load(pid)
        if project.cluster_doc is None:
            raise _NotFound("no cluster report yet")
        return project.cluster_doc

    @app.get("/api/projects/{pid}/clusters/assessments")
    def get_cluster_assessments(pid: str):
        return _load(pid).cluster_notes

    @app.post("/api/projects/{pid}/clusters/assessment")
    def post_cluster_assessment(pid: str, request: Request, payload: dict = Body(...)):
        return _mutate(
            pid, request, "cluster_assessment", {"cluster": payload["cluster"], "text": payload["text"]}
        )

    @app.get("/api/projects/{pid}/export")
    def export_project(pid: str):
        project = _load(pid)
        return Response(
            content=proj.export_bytes(project),
            media_type="application/json",
            headers={"Content-Disposition": f'attachment; filename="{pid}-export.json"'},
        )

    if static_dir is not None and Path(static_dir).is_dir():
        app.mount("/", StaticFiles(directory=str(static_dir), html=True), name="ui")

    return app


def serve(
    project_root: str | Path,
    host: str = "127.0.0.1",
    port: int = 8123,
    static_dir: str | Path | None = None,
):
    """Run the workbench service (blocking)."""
    import uvicorn

    app = create_app(project_root, static_dir=static_dir)
    uvicorn.run(app, host=host, port=port, log_level="warning")
