"""HTTP JSON API over the registry: dataset ingest, exploration summaries,
asynchronous training jobs, model details, and prediction endpoints.

Error mapping: EnrollcastError subclasses become {code, field?, message}
bodies with 400 for malformed input / schema violations, 404 for unknown ids,
409 for a training job colliding with an active one on the same dataset,
422 for domain errors (e.g. a single-class dataset), 500 otherwise.
"""

from __future__ import annotations

import re
import threading
import uuid
from dataclasses import dataclass
from pathlib import Path

from fastapi import FastAPI, Query, Request, Response
from fastapi.exceptions import RequestValidationError
from fastapi.responses import JSONResponse
from fastapi.middleware.cors import CORSMiddleware

from .dataset import FeatureSchema, clean, load_csv, summarize, IMPUTE_MODE, DROP_ROWS
from .errors import (
    BadCsv,
    BadIndex,
    BadLevel,
    BadNumber,
    BadSchema,
    CorruptModel,
    Degenerate,
    DuplicateKey,
    EmptyAfterClean,
    EmptyInput,
    EmptySubset,
    EnrollcastError,
    JobConflict,
    KeyMissing,
    LengthMismatch,
    MissingColumn,
    MissingFeature,
    NotFound,
    SingleClass,
    TooFewPerClass,
    TooFewRows,
    TooManyFeatures,
    UnknownFeature,
    VersionUnsupported,
)
from .pipeline import parse_filters, predict_batch_csv, predict_dataset, predict_record, train_pipeline
from .store import Store, StoredModel, TrainOptions, model_payload
from .logreg import FitConfig
from .featsel import SearchConfig
from .dataset import SplitSpec

_STATUS_BY_ERROR: list[tuple[type, int]] = [
    (NotFound, 404),
    (JobConflict, 409),
    # malformed input / schema violations
    (BadCsv, 400),
    (BadSchema, 400),
    (MissingColumn, 400),
    (BadLevel, 400),
    (BadNumber, 400),
    (MissingFeature, 400),
    (UnknownFeature, 400),
    (KeyMissing, 400),
    (DuplicateKey, 400),
    (LengthMismatch, 400),
    (EmptyInput, 400),
    (EmptySubset, 400),
    (BadIndex, 400),
    (VersionUnsupported, 400),
    # domain errors
    (SingleClass, 422),
    (TooFewPerClass, 422),
    (TooFewRows, 422),
    (TooManyFeatures, 422),
    (EmptyAfterClean, 422),
    (Degenerate, 422),
    # server-side state problems
    (CorruptModel, 500),
]


def _status_for(exc: EnrollcastError) -> int:
    for kind, status in _STATUS_BY_ERROR:
        if isinstance(exc, kind):
            return status
    return 500


def parse_multipart(body: bytes, content_type: str) -> dict[str, bytes]:
    """Minimal multipart/form-data parser (field name -> content bytes)."""
    match = re.search(r'boundary="?([^";]+)"?', content_type)
    if not match:
        raise BadCsv("multipart body lacks a boundary")
    delimiter = b"--" + match.group(1).encode("latin-1")
    fields: dict[str, bytes] = {}
    for section in body.split(delimiter)[1:]:
        if section in (b"--", b"--\r\n", b"", b"\r\n"):
            continue  # closing marker / padding
        section = section.removeprefix(b"\r\n")
        head, sep, content = section.partition(b"\r\n\r\n")
        if not sep:
            continue
        disposition = re.search(rb'Content-Disposition:[^\r\n]*\bname="([^"]*)"', head, re.I)
        if disposition is None:
            continue
        name = disposition.group(1).decode("utf-8", "replace")
        fields[name] = content.removesuffix(b"\r\n")
    return fields


@dataclass
class Job:
    job_id: str
    dataset_id: str
    status: str = "queued"
    model_id: str | None = None
    error: str | None = None

    def to_dict(self) -> dict:
        out = {"job_id": self.job_id, "dataset_id": self.dataset_id, "status": self.status}
        if self.model_id is not None:
            out["model_id"] = self.model_id
        if self.error is not None:
            out["error"] = self.error
        return out


class JobManager:
    """Runs training jobs on background threads, one at a time per dataset."""

    def __init__(self, store: Store):
        self.store = store
        self.jobs: dict[str, Job] = {}
        self._lock = threading.Lock()
        self._active: set[str] = set()

    def submit(self, dataset_id: str, options: TrainOptions) -> Job:
        if not self.store.has_dataset(dataset_id):
            raise NotFound(f"no dataset {dataset_id!r} in store")
        with self._lock:
            if dataset_id in self._active:
                raise JobConflict(f"dataset {dataset_id!r} already has an active training job")
            job = Job(job_id=uuid.uuid4().hex, dataset_id=dataset_id)
            self.jobs[job.job_id] = job
            self._active.add(dataset_id)
        thread = threading.Thread(target=self._run, args=(job, options), daemon=True)
        thread.start()
        return job

    def _run(self, job: Job, options: TrainOptions) -> None:
        job.status = "running"
        try:
            data = self.store.load_dataset(job.dataset_id)
            stored = train_pipeline(data, options, dataset_fingerprint=job.dataset_id)
            job.model_id = self.store.save_model(stored)
            job.status = "done"
        except EnrollcastError as exc:
            job.status = "failed"
            job.error = f"{exc.code}: {exc}"
        except Exception as exc:  # pragma: no cover - defensive
            job.status = "failed"
            job.error = f"internal: {exc}"
        finally:
            with self._lock:
                self._active.discard(job.dataset_id)

    def get(self, job_id: str) -> Job:
        job = self.jobs.get(job_id)
        if job is None:
            raise NotFound(f"no job {job_id!r}")
        return job


def _options_from_body(raw: dict | None) -> TrainOptions:
    raw = raw or {}
    try:
        seed = int(raw.get("seed", 0))
        fit = FitConfig(
            ridge=float(raw.get("ridge", 1e-8)),
            tolerance=float(raw.get("tolerance", 1e-10)),
            max_iterations=int(raw.get("max_iterations", 200)),
            penalize_intercept=bool(raw.get("penalize_intercept", False)),
        )
        search = SearchConfig(
            direction=str(raw.get("direction", "backward")),
            stale_limit=int(raw.get("stale_limit", 5)),
            merit_folds=int(raw.get("merit_folds", 5)),
            seed=seed,
            fit=fit,
        )
        split = SplitSpec(
            train_fraction=float(raw.get("train_fraction", 0.8)),
            seed=seed,
            stratified=bool(raw.get("stratified", True)),
        )
        return TrainOptions(
            select_features=bool(raw.get("select_features", False)),
            search=search,
            fit=fit,
            split=split,
            cv_folds=int(raw.get("cv_folds", 10)),
            threshold=float(raw.get("threshold", 0.5)),
        )
    except (TypeError, ValueError) as exc:
        raise BadSchema(f"bad training options: {exc}") from exc


async def _json_body(request: Request) -> dict:
    try:
        body = await request.json()
    except ValueError as exc:
        raise BadSchema(f"body is not valid JSON: {exc}") from exc
    if not isinstance(body, dict):
        raise BadSchema("body must be a JSON object")
    return body


def _model_view(stored: StoredModel) -> dict:
    """GET /models/{id} body: full payload minus the raw weight values."""
    payload = model_payload(stored)
    logistic = payload["logistic"]
    logistic.pop("weights")
    logistic.pop("intercept")
    payload["logistic"] = logistic
    payload["model_id"] = stored.model_id
    payload["created_at"] = stored.created_at
    return payload


def create_app(store: Store, dashboard_dir: str | Path | None = None) -> FastAPI:
    app = FastAPI(title="enrollcast service")
    app.add_middleware(
        CORSMiddleware, allow_origins=["*"], allow_methods=["*"], allow_headers=["*"]
    )
    jobs = JobManager(store)
    app.state.store = store
    app.state.jobs = jobs

    @app.exception_handler(EnrollcastError)
    async def _domain_error(request: Request, exc: EnrollcastError):
        body = {"code": exc.code, "message": str(exc)}
        if exc.field is not None:
            body["field"] = exc.field
        return JSONResponse(status_code=_status_for(exc), content=body)

    @app.exception_handler(RequestValidationError)
    async def _framework_validation_error(request: Request, exc: RequestValidationError):
        # every 4xx carries the same machine-readable shape
        errors = exc.errors()
        first = errors[0] if errors else {}
        body = {"code": "malformed_request", "message": str(first.get("msg", "invalid request"))}
        loc = first.get("loc")
        if loc:
            body["field"] = str(loc[-1])
        return JSONResponse(status_code=400, content=body)

    @app.get("/health")
    def health():
        return {"status": "ok"}

    @app.post("/datasets", status_code=201)
    async def upload_dataset(request: Request):
        content_type = request.headers.get("content-type", "")
        if "multipart/form-data" not in content_type:
            raise BadCsv("POST /datasets expects multipart/form-data with data + schema parts")
        fields = parse_multipart(await request.body(), content_type)
        if "data" not in fields:
            raise MissingColumn("multipart field 'data' (CSV) is required", field="data")
        if "schema" not in fields:
            raise BadSchema("multipart field 'schema' (JSON) is required", field="schema")
        policy = fields.get("policy", IMPUTE_MODE.encode()).decode("utf-8", "replace")
        if policy not in (IMPUTE_MODE, DROP_ROWS):
            raise BadSchema(f"unknown cleaning policy {policy!r}", field="policy")
        schema = FeatureSchema.from_json(fields["schema"])
        raw = load_csv(fields["data"], schema, source_name="upload")
        cleaned = clean(raw, policy)
        dataset_id = store.save_dataset(cleaned)
        return {
            "dataset_id": dataset_id,
            "rows": len(cleaned.rows),
            "clean_report": cleaned.report.to_dict(),
        }

    @app.get("/datasets")
    def list_datasets():
        return {"datasets": store.list_datasets()}

    @app.get("/datasets/{dataset_id}/summary")
    def dataset_summary(dataset_id: str, by: str):
        data = store.load_dataset(dataset_id)
        groups = summarize(data, by)
        return {
            "dataset_id": dataset_id,
            "by": by,
            "total": len(data.rows),
            "groups": [{"label": label, "count": count} for label, count in groups],
        }

    @app.get("/datasets/{dataset_id}/schema")
    def dataset_schema(dataset_id: str):
        data = store.load_dataset(dataset_id)
        return {"dataset_id": dataset_id, "schema": data.schema.to_dict(), "rows": len(data.rows)}

    @app.get("/datasets/{dataset_id}/rows")
    def dataset_rows(dataset_id: str, offset: int = 0, limit: int = 25):
        data = store.load_dataset(dataset_id)
        offset = max(0, offset)
        limit = max(1, min(limit, 500))
        names = list(data.schema.feature_names)
        page = data.rows[offset : offset + limit]
        return {
            "dataset_id": dataset_id,
            "total": len(data.rows),
            "offset": offset,
            "limit": limit,
            "columns": ["id", *names, data.schema.target_name],
            "rows": [
                {
                    "id": rec.id,
                    "values": {name: rec.values.get(name) for name in names},
                    "outcome": rec.outcome,
                }
                for rec in page
            ],
        }

    @app.post("/models", status_code=202)
    async def start_training(request: Request):
        body = await _json_body(request)
        if "dataset_id" not in body:
            raise BadSchema("body must carry a dataset_id", field="dataset_id")
        raw_options = body.get("options")
        if raw_options is not None and not isinstance(raw_options, dict):
            raise BadSchema("options must be an object", field="options")
        options = _options_from_body(raw_options)
        job = jobs.submit(str(body["dataset_id"]), options)
        return {"job_id": job.job_id}

    @app.get("/jobs/{job_id}")
    def job_status(job_id: str):
        return jobs.get(job_id).to_dict()

    @app.get("/models")
    def list_models():
        return {"models": store.list_models()}

    @app.get("/models/{model_id}")
    def model_details(model_id: str):
        return _model_view(store.load_model(model_id))

    @app.get("/models/{model_id}/predictions")
    def model_predictions(
        model_id: str,
        dataset: str | None = None,
        filters: list[str] = Query(default=[], alias="filter"),
    ):
        stored = store.load_model(model_id)
        dataset_id = dataset or stored.dataset_fingerprint
        if not store.has_dataset(dataset_id):
            raise NotFound(f"no dataset {dataset_id!r} in store; pass ?dataset=")
        data = store.load_dataset(dataset_id)
        parsed = parse_filters(stored.schema, filters)
        records = predict_dataset(stored, data, parsed)
        return {
            "model_id": model_id,
            "dataset_id": dataset_id,
            "filters": parsed,
            "count": len(records),
            "records": [rec.to_dict() for rec in records],
        }

    @app.post("/models/{model_id}/predict")
    async def single_predict(model_id: str, request: Request):
        stored = store.load_model(model_id)
        body = await _json_body(request)
        values = body.get("feature_values", None)
        if values is None:
            values = {k: v for k, v in body.items() if k != "applicant_id"}
        if not isinstance(values, dict):
            raise BadSchema("feature_values must be an object")
        applicant_id = str(body.get("applicant_id", "adhoc"))
        return predict_record(stored, values, applicant_id=applicant_id).to_dict()

    @app.post("/models/{model_id}/predict-batch")
    async def batch_predict(model_id: str, request: Request):
        stored = store.load_model(model_id)
        body = await request.body()
        content_type = request.headers.get("content-type", "")
        if "multipart/form-data" in content_type:
            fields = parse_multipart(body, content_type)
            if "data" not in fields:
                raise MissingColumn("multipart field 'data' (CSV) is required", field="data")
            body = fields["data"]
        _, rendered = predict_batch_csv(stored, body)
        return Response(content=rendered, media_type="text/csv")

    if dashboard_dir is not None and Path(dashboard_dir).is_dir():
        from fastapi.staticfiles import StaticFiles

        app.mount("/app", StaticFiles(directory=str(dashboard_dir), html=True), name="dashboard")

    return app
