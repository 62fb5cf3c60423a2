"""End-to-end orchestration: the training pipeline and prediction plumbing.

``train_pipeline`` mirrors the procedure the rest of the package exists for:
encode the clean dataset, optionally run wrapper feature selection and
restrict to the winning subset, split train/test, fit, score the holdout,
and cross-validate over all rows. The returned StoredModel carries both
evaluation reports and enough option echo to recompute them exactly.
"""

from __future__ import annotations

from dataclasses import dataclass

from .dataset import (
    BINARY,
    ENROLLED,
    NOT_ENROLLED,
    CellValue,
    CleanDataset,
    DesignMatrix,
    Feature,
    FeatureSchema,
    encode,
    load_csv,
    split,
)
from .errors import BadLevel, BadNumber, MissingFeature, UnknownFeature
from .evaluation import EvaluationReport, cross_validate, evaluate_model
from .featsel import apply_subset, best_first_search
from .logreg import fit, predict_proba
from .store import StoredModel, TrainOptions, build_stored_model, dataset_content_id


@dataclass(frozen=True)
class PredictionRecord:
    """One scored applicant: probability, display percentage (one decimal),
    decision label, and an echo of the inputs that produced it."""

    applicant_id: str
    probability: float
    percentage: float
    label: str
    feature_values: dict[str, CellValue]

    def to_dict(self) -> dict:
        return {
            "applicant_id": self.applicant_id,
            "probability": self.probability,
            "percentage": self.percentage,
            "label": self.label,
            "feature_values": dict(self.feature_values),
        }


def train_pipeline(
    data: CleanDataset, options: TrainOptions, dataset_fingerprint: str | None = None
) -> StoredModel:
    """Run the full training procedure on a clean dataset."""
    matrix = encode(data)
    selected = None
    if options.select_features:
        selected = best_first_search(matrix, options.search)
        matrix = apply_subset(matrix, selected.selected)
    train, test = split(matrix, options.split)
    model = fit(train, options.fit)
    holdout = evaluate_model(model, test, options.threshold)
    cv = cross_validate(matrix, options.cv_folds, options.fit, options.split.seed)
    return build_stored_model(
        logistic=model,
        schema=data.schema,
        selected_subset=selected,
        holdout_eval=holdout,
        cv_eval=cv,
        dataset_fingerprint=dataset_fingerprint or dataset_content_id(data),
        options=options,
    )


def _parse_input_value(feature: Feature, value) -> CellValue:
    if feature.kind == BINARY:
        if not isinstance(value, str) or value not in feature.levels:
            raise BadLevel(
                f"{value!r} is not a level of {feature.name!r} "
                f"(expected one of {list(feature.levels)})",
                field=feature.name,
            )
        return value
    if isinstance(value, bool):
        raise BadNumber(f"{value!r} is not numeric for {feature.name!r}", field=feature.name)
    try:
        return float(value)
    except (TypeError, ValueError):
        raise BadNumber(
            f"{value!r} is not numeric for {feature.name!r}", field=feature.name
        ) from None


def predict_record(
    stored: StoredModel,
    feature_values: dict,
    applicant_id: str = "adhoc",
    threshold: float | None = None,
) -> PredictionRecord:
    """Score one applicant from raw feature values.

    Every model feature must be present; extra values are accepted if they
    belong to the schema (they are validated and echoed, useful for filters)
    and rejected otherwise.
    """
    if threshold is None:
        threshold = stored.options.threshold
    schema = stored.schema
    known = set(schema.feature_names)
    echo: dict[str, CellValue] = {}
    for name, value in feature_values.items():
        if name not in known:
            raise UnknownFeature(f"{name!r} is not a schema feature", field=name)
        if value is None or value == "":
            continue  # treated as absent
        echo[name] = _parse_input_value(schema.feature(name), value)

    row = []
    for name in stored.logistic.feature_names:
        if name not in echo:
            raise MissingFeature(f"feature {name!r} is required", field=name)
        feature = schema.feature(name)
        value = echo[name]
        row.append((1.0 if value == feature.levels[1] else 0.0) if feature.kind == BINARY else value)

    probability = predict_proba(stored.logistic, row)
    return PredictionRecord(
        applicant_id=applicant_id,
        probability=probability,
        percentage=round(100.0 * probability, 1),
        label=ENROLLED if probability >= threshold else NOT_ENROLLED,
        feature_values=echo,
    )


def _matches(feature: Feature, value: CellValue, wanted: str) -> bool:
    if feature.kind == BINARY:
        return value == wanted
    try:
        return float(value) == float(wanted)
    except (TypeError, ValueError):
        return False


def parse_filters(schema: FeatureSchema, raw_filters: list[str]) -> dict[str, str]:
    """Parse ``Feature=Level`` strings, validating names and binary levels."""
    filters: dict[str, str] = {}
    for item in raw_filters:
        name, sep, wanted = item.partition("=")
        if not sep:
            raise UnknownFeature(f"filter {item!r} must look like Feature=Level")
        feature = schema.feature(name)  # raises UnknownFeature
        if feature.kind == BINARY and wanted not in feature.levels:
            raise BadLevel(
                f"{wanted!r} is not a level of {name!r} (expected one of {list(feature.levels)})",
                field=name,
            )
        if feature.kind != BINARY:
            try:
                float(wanted)
            except ValueError:
                raise BadNumber(f"filter value {wanted!r} is not numeric for {name!r}",
                                field=name) from None
        filters[name] = wanted
    return filters


def predict_dataset(
    stored: StoredModel, data: CleanDataset, filters: dict[str, str] | None = None
) -> list[PredictionRecord]:
    """Score every dataset row whose values match all filters."""
    filters = filters or {}
    schema = stored.schema
    records = []
    for rec in data.rows:
        keep = all(
            _matches(schema.feature(name), rec.values.get(name), wanted)
            for name, wanted in filters.items()
        )
        if keep:
            records.append(predict_record(stored, rec.values, applicant_id=rec.id))
    return records


def _model_input_schema(stored: StoredModel) -> FeatureSchema:
    features = tuple(stored.schema.feature(n) for n in stored.logistic.feature_names)
    return FeatureSchema(
        features=features,
        target_name=stored.schema.target_name,
        positive_label=stored.schema.positive_label,
    )


def predict_batch_csv(stored: StoredModel, source: bytes) -> tuple[list[PredictionRecord], str]:
    """Score a CSV of applicants (model feature columns required, target
    optional). Returns the records plus a rendered CSV with probability,
    percentage and label columns appended."""
    schema = _model_input_schema(stored)
    raw = load_csv(source, schema, require_target=False)
    records = []
    for rec in raw.rows:
        values = {k: v for k, v in rec.values.items() if v is not None}
        records.append(predict_record(stored, values, applicant_id=rec.id))
    return records, render_predictions_csv(stored, records)


def render_predictions_csv(stored: StoredModel, records: list[PredictionRecord]) -> str:
    import csv as _csv
    import io as _io

    buf = _io.StringIO()
    writer = _csv.writer(buf, lineterminator="\n")
    names = list(stored.logistic.feature_names)
    writer.writerow(["applicant_id", *names, "probability", "percentage", "label"])
    for rec in records:
        cells = [rec.applicant_id]
        for name in names:
            value = rec.feature_values.get(name)
            if isinstance(value, float):
                cells.append(str(int(value)) if value.is_integer() else repr(value))
            else:
                cells.append("" if value is None else value)
        cells.extend([repr(rec.probability), f"{rec.percentage:.1f}", rec.label])
        writer.writerow(cells)
    return buf.getvalue()


def matrix_for_model(stored: StoredModel, data: CleanDataset) -> DesignMatrix:
    """Encode a dataset and restrict it to the model's feature columns."""
    full = encode(data)
    indices = [full.feature_names.index(name) for name in stored.logistic.feature_names]
    return full.select(indices)


def evaluate_on_dataset(stored: StoredModel, data: CleanDataset) -> EvaluationReport:
    """Score a stored model against a labeled dataset."""
    return evaluate_model(
        stored.logistic, matrix_for_model(stored, data), stored.options.threshold
    )
