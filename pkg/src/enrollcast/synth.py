"""Seeded synthetic applicant data.

The real admissions data is not redistributable, so this generator produces
format-compatible datasets with a known ground truth: a subset of features is
informative (their true logistic weights are non-zero), the rest are noise.
That makes the Bayes-optimal classifier computable, which the acceptance
suite uses to judge pipeline recovery.
"""

from __future__ import annotations

import json
from dataclasses import dataclass

import numpy as np

from .dataset import (
    BINARY,
    NUMERIC,
    ApplicantRecord,
    ENROLLED,
    NOT_ENROLLED,
    DesignMatrix,
    Feature,
    FeatureSchema,
    RawDataset,
)
from .errors import BadSchema, DimensionMismatch
from .logreg import sigmoid

# the attribute names the admissions domain uses; the first eleven are the
# canonical selected set, the rest are neutral placeholders
_NAMED_FEATURES: tuple[Feature, ...] = (
    Feature("OL_Pursued", BINARY, ("No", "Yes")),
    Feature("Within_City", BINARY, ("No", "Yes")),
    Feature("Within_Province", BINARY, ("No", "Yes")),
    Feature("Religion_Binary", BINARY, ("No", "Yes")),
    Feature("College_Admitted_To_Binary", BINARY, ("No", "Yes")),
    Feature("Total_Siblings", NUMERIC),
    Feature("Ordinal_Position", NUMERIC),
    Feature("Previous_School_Binary", BINARY, ("No", "Yes")),
    Feature("Campaign_Binary", BINARY, ("No", "Yes")),
    Feature("School_Choice", BINARY, ("No", "Yes")),
    Feature("School_Type", BINARY, ("Public", "Private")),
    Feature("Gender", BINARY, ("Female", "Male")),
    Feature("Parent_Employed", BINARY, ("No", "Yes")),
    Feature("Scholarship_Flag", BINARY, ("No", "Yes")),
    Feature("Early_Applicant", BINARY, ("No", "Yes")),
    Feature("Campus_Visit", BINARY, ("No", "Yes")),
    Feature("Online_Inquiry", BINARY, ("No", "Yes")),
    Feature("Feeder_School", BINARY, ("No", "Yes")),
    Feature("Sibling_Alumnus", BINARY, ("No", "Yes")),
)

TARGET_NAME = "Enrolled"
POSITIVE_LABEL = "Yes"
NEGATIVE_LABEL = "No"


def default_schema(features: int = 19) -> FeatureSchema:
    """The bundled applicant schema: 19 features by default (11 named
    attributes plus placeholders), binary except two sibling counts."""
    if features < 1:
        raise ValueError("need at least one feature")
    feats = list(_NAMED_FEATURES[:features])
    for extra in range(len(feats) + 1, features + 1):
        feats.append(Feature(f"Extra_{extra:02d}", BINARY, ("No", "Yes")))
    return FeatureSchema(
        features=tuple(feats), target_name=TARGET_NAME, positive_label=POSITIVE_LABEL
    )


def schema_for_csv_header(header: list[str]) -> FeatureSchema:
    """Restrict the bundled schema to the features a CSV header carries.

    Lets generated data of any width flow back in without a schema file;
    level declarations still come from the bundle, never from the data.
    """
    pool = default_schema(max(19, len(header))).features
    chosen = tuple(f for f in pool if f.name in header)
    if not chosen:
        raise BadSchema("header has no bundled feature names; pass --schema")
    return FeatureSchema(
        features=chosen, target_name=TARGET_NAME, positive_label=POSITIVE_LABEL
    )


@dataclass(frozen=True)
class SynthTruth:
    """The generating model: which features matter and by how much."""

    schema: FeatureSchema
    informative: tuple[int, ...]
    weights: tuple[float, ...]  # aligned to schema features; zero = noise
    intercept: float
    seed: int

    @property
    def informative_names(self) -> tuple[str, ...]:
        names = self.schema.feature_names
        return tuple(names[i] for i in self.informative)

    def bayes_probabilities(self, matrix: DesignMatrix) -> np.ndarray:
        """True enrolment probabilities for rows of a fully-encoded matrix."""
        if matrix.feature_names != self.schema.feature_names:
            raise DimensionMismatch("matrix must carry the full generator schema")
        return sigmoid(matrix.x[:, 1:] @ np.asarray(self.weights) + self.intercept)

    def to_dict(self) -> dict:
        return {
            "seed": self.seed,
            "informative_indices": list(self.informative),
            "informative_names": list(self.informative_names),
            "weights": {
                name: w
                for name, w in zip(self.schema.feature_names, self.weights)
            },
            "intercept": self.intercept,
            "schema": self.schema.to_dict(),
        }

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), indent=2, sort_keys=True)


def generate(
    rows: int,
    features: int = 19,
    informative: int = 11,
    seed: int = 0,
    missing_rate: float = 0.0,
) -> tuple[RawDataset, SynthTruth]:
    """Draw a synthetic applicant dataset with ``informative`` planted
    features out of ``features`` total.

    Binary features are Bernoulli draws with per-feature base rates; the two
    numeric count features are small binomials. Outcomes are Bernoulli draws
    from the true logistic model, whose intercept centers the class balance.
    """
    if rows < 1:
        raise ValueError("rows must be >= 1")
    if not 0 <= informative <= features:
        raise ValueError("need 0 <= informative <= features")
    if not 0.0 <= missing_rate < 1.0:
        raise ValueError("missing_rate must be in [0, 1)")

    rng = np.random.default_rng(seed)
    schema = default_schema(features)
    feats = schema.features

    planted = np.sort(rng.choice(features, size=informative, replace=False)) if informative else np.array([], dtype=int)
    base_rates = rng.uniform(0.35, 0.65, size=features)

    weights = np.zeros(features)
    for rank, j in enumerate(planted):
        sign = 1.0 if rank % 2 == 0 else -1.0
        if feats[j].kind == NUMERIC:
            weights[j] = sign * rng.uniform(0.35, 0.65)
        else:
            weights[j] = sign * rng.uniform(0.9, 1.8)

    columns = []
    means = []
    for j, f in enumerate(feats):
        if f.kind == NUMERIC:
            if f.name == "Ordinal_Position":
                columns.append(1.0 + rng.binomial(7, 0.4, size=rows).astype(float))
                means.append(1.0 + 7 * 0.4)
            else:
                columns.append(rng.binomial(8, 0.35, size=rows).astype(float))
                means.append(8 * 0.35)
        else:
            columns.append((rng.random(rows) < base_rates[j]).astype(float))
            means.append(base_rates[j])
    x = np.column_stack(columns)

    intercept = -float(np.asarray(means) @ weights)
    probabilities = sigmoid(x @ weights + intercept)
    y = rng.random(rows) < probabilities

    missing = (
        rng.random((rows, features)) < missing_rate
        if missing_rate > 0
        else np.zeros((rows, features), dtype=bool)
    )

    records = []
    for i in range(rows):
        values = {}
        for j, f in enumerate(feats):
            if missing[i, j]:
                values[f.name] = None
            elif f.kind == NUMERIC:
                values[f.name] = float(x[i, j])
            else:
                values[f.name] = f.levels[1] if x[i, j] == 1.0 else f.levels[0]
        records.append(
            ApplicantRecord(
                id=str(i + 1),
                values=values,
                outcome=ENROLLED if y[i] else NOT_ENROLLED,
            )
        )

    truth = SynthTruth(
        schema=schema,
        informative=tuple(int(j) for j in planted),
        weights=tuple(float(w) for w in weights),
        intercept=intercept,
        seed=seed,
    )
    dataset = RawDataset(
        schema=schema, rows=tuple(records), provenance=(f"synth(seed={seed})",)
    )
    return dataset, truth
