"""Content-addressed persistence for datasets and trained models.

Everything is stored as canonical JSON (sorted keys, compact separators) so
that identical content always produces identical bytes and therefore an
identical id (sha256 of the payload). Model weights are encoded as hexadecimal
floating point, which round-trips bit-exactly; remaining floats rely on
Python's shortest round-trip decimal repr, which is also exact.

Wall-clock metadata (created_at) lives in the registry index, never inside a
content-addressed payload, so re-training with a fixed seed yields a
byte-identical model file.
"""

from __future__ import annotations

import hashlib
import json
import threading
from dataclasses import dataclass, field, replace
from datetime import datetime, timezone
from pathlib import Path

from .dataset import (
    ENROLLED,
    NOT_ENROLLED,
    ApplicantRecord,
    CleanDataset,
    CleanReport,
    FeatureSchema,
    SplitSpec,
)
from .errors import CorruptModel, NotFound, VersionUnsupported
from .evaluation import (
    ClassMetrics,
    ConfusionMatrix,
    CvReport,
    EvaluationReport,
    RocCurve,
)
from .featsel import SearchConfig, SubsetSearchResult
from .logreg import FitConfig, LogisticModel

FORMAT_VERSION = 1


@dataclass(frozen=True)
class TrainOptions:
    """Everything needed to reproduce a training run exactly."""

    select_features: bool = False
    search: SearchConfig = field(default_factory=SearchConfig)
    fit: FitConfig = field(default_factory=FitConfig)
    split: SplitSpec = field(default_factory=SplitSpec)
    cv_folds: int = 10
    threshold: float = 0.5

    def to_dict(self) -> dict:
        return {
            "select_features": self.select_features,
            "search": {
                "direction": self.search.direction,
                "stale_limit": self.search.stale_limit,
                "merit_folds": self.search.merit_folds,
                "seed": self.search.seed,
            },
            "fit": {
                "ridge": self.fit.ridge,
                "tolerance": self.fit.tolerance,
                "max_iterations": self.fit.max_iterations,
                "penalize_intercept": self.fit.penalize_intercept,
            },
            "split": {
                "train_fraction": self.split.train_fraction,
                "seed": self.split.seed,
                "stratified": self.split.stratified,
            },
            "cv_folds": self.cv_folds,
            "threshold": self.threshold,
        }

    @staticmethod
    def from_dict(raw: dict) -> "TrainOptions":
        fit = FitConfig(
            ridge=float(raw["fit"]["ridge"]),
            tolerance=float(raw["fit"]["tolerance"]),
            max_iterations=int(raw["fit"]["max_iterations"]),
            penalize_intercept=bool(raw["fit"]["penalize_intercept"]),
        )
        return TrainOptions(
            select_features=bool(raw["select_features"]),
            search=SearchConfig(
                direction=str(raw["search"]["direction"]),
                stale_limit=int(raw["search"]["stale_limit"]),
                merit_folds=int(raw["search"]["merit_folds"]),
                seed=int(raw["search"]["seed"]),
                fit=fit,
            ),
            fit=fit,
            split=SplitSpec(
                train_fraction=float(raw["split"]["train_fraction"]),
                seed=int(raw["split"]["seed"]),
                stratified=bool(raw["split"]["stratified"]),
            ),
            cv_folds=int(raw["cv_folds"]),
            threshold=float(raw["threshold"]),
        )


@dataclass(frozen=True)
class StoredModel:
    """A trained model bundled with its schema, selection result, evaluation
    reports and provenance. ``model_id`` is the sha256 of the serialized
    content, so equal content means equal id."""

    model_id: str
    logistic: LogisticModel
    schema: FeatureSchema
    selected_subset: SubsetSearchResult | None
    holdout_eval: EvaluationReport | None
    cv_eval: CvReport | None
    dataset_fingerprint: str
    options: TrainOptions
    created_at: str = ""


def canonical_json(obj) -> bytes:
    return json.dumps(obj, sort_keys=True, separators=(",", ":")).encode("ascii")


def content_id(payload: dict) -> str:
    return hashlib.sha256(canonical_json(payload)).hexdigest()


def _hex(value: float) -> str:
    return float(value).hex()


def _unhex(text: str) -> float:
    return float.fromhex(text)


# ---------------------------------------------------------------------------
# codecs

def _logistic_to_dict(model: LogisticModel) -> dict:
    return {
        "intercept": _hex(model.intercept),
        "weights": [_hex(w) for w in model.weights],
        "feature_names": list(model.feature_names),
        "ridge": model.ridge,
        "iterations_used": model.iterations_used,
        "converged": model.converged,
        "final_objective": _hex(model.final_objective),
    }


def _logistic_from_dict(raw: dict) -> LogisticModel:
    return LogisticModel(
        intercept=_unhex(raw["intercept"]),
        weights=tuple(_unhex(w) for w in raw["weights"]),
        feature_names=tuple(raw["feature_names"]),
        ridge=float(raw["ridge"]),
        iterations_used=int(raw["iterations_used"]),
        converged=bool(raw["converged"]),
        final_objective=_unhex(raw["final_objective"]),
    )


def _metrics_from_dict(raw: dict) -> ClassMetrics:
    return ClassMetrics(
        tp_rate=float(raw["tp_rate"]),
        fp_rate=float(raw["fp_rate"]),
        precision=float(raw["precision"]),
        recall=float(raw["recall"]),
        f_measure=float(raw["f_measure"]),
        accuracy=float(raw["accuracy"]),
        degenerate=bool(raw["degenerate"]),
    )


def _confusion_from_dict(raw: dict) -> ConfusionMatrix:
    return ConfusionMatrix(
        tp=int(raw["tp"]), fp=int(raw["fp"]), tn=int(raw["tn"]), fn=int(raw["fn"])
    )


def _report_from_dict(raw: dict) -> EvaluationReport:
    return EvaluationReport(
        confusion=_confusion_from_dict(raw["confusion"]),
        positive=_metrics_from_dict(raw["positive"]),
        negative=_metrics_from_dict(raw["negative"]),
        weighted=_metrics_from_dict(raw["weighted"]),
        roc=RocCurve(
            points=tuple((float(a), float(b)) for a, b in raw["roc"]["points"]),
            auc=float(raw["roc"]["auc"]),
        ),
        threshold=float(raw["threshold"]),
    )


def _cv_from_dict(raw: dict) -> CvReport:
    return CvReport(
        k=int(raw["k"]),
        seed=int(raw["seed"]),
        per_fold=tuple(_metrics_from_dict(m) for m in raw["per_fold"]),
        pooled=_metrics_from_dict(raw["pooled"]),
        pooled_auc=float(raw["pooled_auc"]),
        pooled_confusion=_confusion_from_dict(raw["pooled_confusion"]),
    )


def _subset_from_dict(raw: dict) -> SubsetSearchResult:
    return SubsetSearchResult(
        selected=tuple(int(i) for i in raw["selected"]),
        merit=float(raw["merit"]),
        subsets_evaluated=int(raw["subsets_evaluated"]),
        nodes_expanded=int(raw["nodes_expanded"]),
        trace=tuple(
            (tuple(int(i) for i in subset), float(merit)) for subset, merit in raw["trace"]
        ),
    )


def model_payload(stored: StoredModel) -> dict:
    return {
        "logistic": _logistic_to_dict(stored.logistic),
        "schema": stored.schema.to_dict(),
        "selected_subset": (
            stored.selected_subset.to_dict(stored.schema.feature_names)
            if stored.selected_subset is not None
            else None
        ),
        "evaluation": {
            "holdout": stored.holdout_eval.to_dict() if stored.holdout_eval else None,
            "cv": stored.cv_eval.to_dict() if stored.cv_eval else None,
        },
        "dataset_fingerprint": stored.dataset_fingerprint,
        "options": stored.options.to_dict(),
    }


def build_stored_model(
    logistic: LogisticModel,
    schema: FeatureSchema,
    selected_subset: SubsetSearchResult | None,
    holdout_eval: EvaluationReport | None,
    cv_eval: CvReport | None,
    dataset_fingerprint: str,
    options: TrainOptions,
) -> StoredModel:
    """Assemble a StoredModel, stamping its content-derived id."""
    stored = StoredModel(
        model_id="",
        logistic=logistic,
        schema=schema,
        selected_subset=selected_subset,
        holdout_eval=holdout_eval,
        cv_eval=cv_eval,
        dataset_fingerprint=dataset_fingerprint,
        options=options,
    )
    return replace(stored, model_id=content_id(model_payload(stored)))


def model_file_bytes(stored: StoredModel) -> bytes:
    body = {
        "format_version": FORMAT_VERSION,
        "kind": "model",
        "model_id": stored.model_id,
        "payload": model_payload(stored),
    }
    return canonical_json(body) + b"\n"


def parse_model_file(data: bytes, created_at: str = "") -> StoredModel:
    try:
        body = json.loads(data)
    except ValueError as exc:
        raise CorruptModel(f"model file is not valid JSON: {exc}") from exc
    if body.get("format_version") != FORMAT_VERSION:
        raise VersionUnsupported(
            f"model format_version {body.get('format_version')!r} is not supported"
        )
    payload = body.get("payload")
    if not isinstance(payload, dict):
        raise CorruptModel("model file lacks a payload object")
    declared = body.get("model_id", "")
    actual = content_id(payload)
    if declared != actual:
        raise CorruptModel(f"content hash mismatch: file says {declared}, content is {actual}")
    evaluation = payload.get("evaluation") or {}
    return StoredModel(
        model_id=declared,
        logistic=_logistic_from_dict(payload["logistic"]),
        schema=FeatureSchema.from_dict(payload["schema"]),
        selected_subset=(
            _subset_from_dict(payload["selected_subset"])
            if payload.get("selected_subset")
            else None
        ),
        holdout_eval=_report_from_dict(evaluation["holdout"]) if evaluation.get("holdout") else None,
        cv_eval=_cv_from_dict(evaluation["cv"]) if evaluation.get("cv") else None,
        dataset_fingerprint=payload["dataset_fingerprint"],
        options=TrainOptions.from_dict(payload["options"]),
        created_at=created_at,
    )


def write_model_file(stored: StoredModel, path: str | Path) -> Path:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    path.write_bytes(model_file_bytes(stored))
    return path


def read_model_file(path: str | Path) -> StoredModel:
    path = Path(path)
    if not path.is_file():
        raise NotFound(f"no model file at {path}")
    stamp = datetime.fromtimestamp(path.stat().st_mtime, tz=timezone.utc)
    return parse_model_file(path.read_bytes(), created_at=stamp.isoformat(timespec="seconds"))


# ---------------------------------------------------------------------------
# dataset payloads

def _cell_to_json(value):
    return value  # str or float; clean datasets have no None cells


def dataset_payload(data: CleanDataset) -> dict:
    return {
        "schema": data.schema.to_dict(),
        "rows": [
            {
                "id": rec.id,
                "values": {k: _cell_to_json(v) for k, v in sorted(rec.values.items())},
                "outcome": rec.outcome,
            }
            for rec in data.rows
        ],
        "provenance": list(data.provenance),
        "report": data.report.to_dict(),
    }


def dataset_content_id(data: CleanDataset) -> str:
    """Hash of the dataset content alone: provenance is lineage metadata, so
    the same rows+schema get the same id no matter how they arrived."""
    payload = dataset_payload(data)
    payload.pop("provenance")
    return content_id(payload)


def _dataset_from_payload(payload: dict) -> CleanDataset:
    schema = FeatureSchema.from_dict(payload["schema"])
    rows = []
    for raw in payload["rows"]:
        outcome = raw["outcome"]
        if outcome not in (ENROLLED, NOT_ENROLLED):
            raise CorruptModel(f"dataset row {raw['id']} has outcome {outcome!r}")
        values = {
            name: (float(v) if schema.feature(name).kind == "numeric" else str(v))
            for name, v in raw["values"].items()
        }
        rows.append(ApplicantRecord(id=str(raw["id"]), values=values, outcome=outcome))
    report = payload.get("report", {})
    return CleanDataset(
        schema=schema,
        rows=tuple(rows),
        provenance=tuple(payload.get("provenance", ())),
        report=CleanReport(
            duplicates_removed=int(report.get("duplicates_removed", 0)),
            rows_dropped=int(report.get("rows_dropped", 0)),
            cells_imputed=int(report.get("cells_imputed", 0)),
        ),
    )


# ---------------------------------------------------------------------------
# the registry

def _now() -> str:
    return datetime.now(timezone.utc).isoformat(timespec="seconds")


class Store:
    """Directory-backed registry of immutable datasets and models.

    Files are content-addressed; the index holds only registry metadata
    (creation timestamps, row counts). Saving identical content twice is a
    no-op that returns the same id.
    """

    def __init__(self, root: str | Path):
        self.root = Path(root)
        self.models_dir = self.root / "models"
        self.datasets_dir = self.root / "datasets"
        self.models_dir.mkdir(parents=True, exist_ok=True)
        self.datasets_dir.mkdir(parents=True, exist_ok=True)
        self._index_path = self.root / "index.json"
        self._lock = threading.Lock()

    def _read_index(self) -> dict:
        if not self._index_path.is_file():
            return {"models": {}, "datasets": {}}
        return json.loads(self._index_path.read_text())

    def _update_index(self, kind: str, key: str, meta: dict) -> None:
        with self._lock:
            index = self._read_index()
            index.setdefault(kind, {}).setdefault(key, meta)
            self._index_path.write_text(json.dumps(index, sort_keys=True, indent=1))

    # datasets -------------------------------------------------------------
    def save_dataset(self, data: CleanDataset) -> str:
        payload = dataset_payload(data)
        dataset_id = dataset_content_id(data)
        path = self.datasets_dir / f"{dataset_id}.json"
        if not path.exists():
            body = {
                "format_version": FORMAT_VERSION,
                "kind": "dataset",
                "dataset_id": dataset_id,
                "payload": payload,
            }
            path.write_bytes(canonical_json(body) + b"\n")
        self._update_index("datasets", dataset_id, {"created_at": _now(), "rows": len(data.rows)})
        return dataset_id

    def has_dataset(self, dataset_id: str) -> bool:
        return (self.datasets_dir / f"{dataset_id}.json").is_file()

    def load_dataset(self, dataset_id: str) -> CleanDataset:
        path = self.datasets_dir / f"{dataset_id}.json"
        if not path.is_file():
            raise NotFound(f"no dataset {dataset_id!r} in store")
        body = json.loads(path.read_bytes())
        if body.get("format_version") != FORMAT_VERSION:
            raise VersionUnsupported(
                f"dataset format_version {body.get('format_version')!r} is not supported"
            )
        payload = body["payload"]
        hashed = dict(payload)
        hashed.pop("provenance", None)
        if content_id(hashed) != dataset_id:
            raise CorruptModel(f"dataset {dataset_id} content hash mismatch")
        return _dataset_from_payload(payload)

    def list_datasets(self) -> list[dict]:
        index = self._read_index().get("datasets", {})
        out = []
        for path in sorted(self.datasets_dir.glob("*.json")):
            dataset_id = path.stem
            meta = index.get(dataset_id, {})
            out.append(
                {
                    "dataset_id": dataset_id,
                    "rows": meta.get("rows"),
                    "created_at": meta.get("created_at", ""),
                }
            )
        return out

    # models ---------------------------------------------------------------
    def save_model(self, stored: StoredModel) -> str:
        if not stored.model_id:
            stored = replace(stored, model_id=content_id(model_payload(stored)))
        path = self.models_dir / f"{stored.model_id}.json"
        if not path.exists():
            path.write_bytes(model_file_bytes(stored))
        self._update_index("models", stored.model_id, {"created_at": _now()})
        return stored.model_id

    def load_model(self, model_id: str) -> StoredModel:
        path = self.models_dir / f"{model_id}.json"
        if not path.is_file():
            raise NotFound(f"no model {model_id!r} in store")
        meta = self._read_index().get("models", {}).get(model_id, {})
        stored = parse_model_file(path.read_bytes(), created_at=meta.get("created_at", ""))
        if stored.model_id != model_id:
            raise CorruptModel(f"model {model_id} content hash mismatch")
        return stored

    def list_models(self) -> list[dict]:
        index = self._read_index().get("models", {})
        out = []
        for path in sorted(self.models_dir.glob("*.json")):
            model_id = path.stem
            meta = index.get(model_id, {})
            out.append({"model_id": model_id, "created_at": meta.get("created_at", "")})
        return out
