/** Canned API responses used across the view tests. Shapes mirror the
 * server's JSON exactly; tests replay them into the pure render functions. */

import type {
  ModelDetails,
  PredictionRecord,
  PredictionsResponse,
  RowsResponse,
  SchemaResponse,
  SummaryResponse,
} from "../src/api";

export const SCHEMA: SchemaResponse["schema"] = {
  features: [
    { name: "Within_City", kind: "binary_categorical", levels: ["No", "Yes"] },
    { name: "College_Admitted_To_Binary", kind: "binary_categorical", levels: ["No", "Yes"] },
    { name: "Religion_Binary", kind: "binary_categorical", levels: ["No", "Yes"] },
    { name: "Gender", kind: "binary_categorical", levels: ["Female", "Male"] },
    { name: "School_Type", kind: "binary_categorical", levels: ["Public", "Private"] },
    { name: "Total_Siblings", kind: "numeric" },
  ],
  target: "Enrolled",
  positive_label: "Yes",
};

export const DATASET_ID = "ds-0001";
export const MODEL_ID = "model-0001";
export const TOTAL_ROWS = 120;

export const GROUPINGS = [
  "Within_City",
  "College_Admitted_To_Binary",
  "Religion_Binary",
  "Gender",
  "School_Type",
] as const;

/** Five grouping summaries; every one sums to TOTAL_ROWS. */
export const SUMMARIES: Record<string, SummaryResponse> = {
  Within_City: summary("Within_City", [
    ["Yes", 70],
    ["No", 50],
  ]),
  College_Admitted_To_Binary: summary("College_Admitted_To_Binary", [
    ["No", 65],
    ["Yes", 55],
  ]),
  Religion_Binary: summary("Religion_Binary", [
    ["Yes", 90],
    ["No", 30],
  ]),
  Gender: summary("Gender", [
    ["Female", 61],
    ["Male", 59],
  ]),
  School_Type: summary("School_Type", [
    ["Public", 84],
    ["Private", 36],
  ]),
};

function summary(by: string, pairs: [string, number][]): SummaryResponse {
  return {
    dataset_id: DATASET_ID,
    by,
    total: pairs.reduce((total, [, count]) => total + count, 0),
    groups: pairs.map(([label, count]) => ({ label, count })),
  };
}

export function schemaResponse(): SchemaResponse {
  return { dataset_id: DATASET_ID, rows: TOTAL_ROWS, schema: SCHEMA };
}

export function rowsResponse(): RowsResponse {
  return {
    dataset_id: DATASET_ID,
    total: TOTAL_ROWS,
    offset: 0,
    limit: 25,
    columns: ["id", ...SCHEMA.features.map((f) => f.name), "Enrolled"],
    rows: Array.from({ length: 25 }, (_, i) => ({
      id: String(i + 1),
      values: {
        Within_City: i % 2 ? "Yes" : "No",
        College_Admitted_To_Binary: "Yes",
        Religion_Binary: "No",
        Gender: i % 3 ? "Female" : "Male",
        School_Type: "Public",
        Total_Siblings: i % 5,
      },
      outcome: i % 2 ? "enrolled" : "not_enrolled",
    })),
  };
}

export function modelDetails(withSelection = true): ModelDetails {
  const metrics = (seedValue: number) => ({
    tp_rate: 0.84,
    fp_rate: 0.301,
    precision: 0.772,
    recall: 0.84,
    f_measure: 0.805,
    accuracy: 0.7731 + seedValue,
    degenerate: false,
  });
  return {
    model_id: MODEL_ID,
    created_at: "2021-05-30T00:00:00+00:00",
    dataset_fingerprint: DATASET_ID,
    schema: SCHEMA,
    logistic: {
      feature_names: withSelection
        ? ["Within_City", "School_Type", "Total_Siblings"]
        : SCHEMA.features.map((f) => f.name),
      ridge: 1e-8,
      iterations_used: 9,
      converged: true,
    },
    selected_subset: withSelection
      ? {
          selected: [0, 4, 5],
          selected_names: ["Within_City", "School_Type", "Total_Siblings"],
          merit: 0.775,
          subsets_evaluated: 175,
          nodes_expanded: 12,
          trace: [
            [[0, 1, 2, 3, 4, 5], 0.75],
            [[0, 4, 5], 0.775],
          ],
        }
      : null,
    evaluation: {
      holdout: {
        confusion: { tp: 42, fp: 12, tn: 51, fn: 15 },
        positive: metrics(0),
        negative: metrics(0.001),
        weighted: metrics(0.002),
        roc: {
          points: [
            [0, 0],
            [0.3, 0.8],
            [1, 1],
          ],
          auc: 0.8125,
        },
        threshold: 0.5,
      },
      cv: {
        k: 10,
        seed: 7,
        per_fold: [metrics(0.003)],
        pooled: metrics(0.004),
        pooled_auc: 0.7991,
        pooled_confusion: { tp: 210, fp: 60, tn: 255, fn: 75 },
      },
    },
  };
}

export function predictionsResponse(
  filters: Record<string, string> = {},
  records?: PredictionRecord[],
): PredictionsResponse {
  const all: PredictionRecord[] = Array.from({ length: 20 }, (_, i) => ({
    applicant_id: String(i + 1),
    probability: 0.3 + 0.02 * i,
    percentage: Math.round((30 + 2 * i) * 10) / 10,
    label: 0.3 + 0.02 * i >= 0.5 ? "enrolled" : "not_enrolled",
    feature_values: {
      Within_City: i % 2 ? "Yes" : "No",
      College_Admitted_To_Binary: "Yes",
      Religion_Binary: "No",
      Gender: i % 3 ? "Female" : "Male",
      School_Type: i % 4 ? "Public" : "Private",
      Total_Siblings: i % 5,
    },
  }));
  const chosen =
    records ??
    all.filter((record) =>
      Object.entries(filters).every(
        ([name, level]) => String(record.feature_values[name]) === level,
      ),
    );
  return {
    model_id: MODEL_ID,
    dataset_id: DATASET_ID,
    filters,
    count: chosen.length,
    records: chosen,
  };
}
