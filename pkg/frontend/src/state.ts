/** Dashboard view state and the data cache the views render from.
 *
 * Views are pure functions of (ViewState, ViewData); all mutation happens
 * through the store so a render is always reproducible from its inputs.
 */

import type {
  DatasetInfo,
  ModelDetails,
  ModelInfo,
  PredictionRecord,
  PredictionsResponse,
  RowsResponse,
  SchemaResponse,
  SummaryResponse,
} from "./api";

export type TabName = "exploration" | "model_details" | "prediction_viz" | "predict_now";

export const TABS: { id: TabName; title: string }[] = [
  { id: "exploration", title: "Data Exploration" },
  { id: "model_details", title: "Predictive Model Details" },
  { id: "prediction_viz", title: "Prediction Visualization" },
  { id: "predict_now", title: "Predict Now" },
];

export interface ViewState {
  active_tab: TabName;
  selected_dataset: string | null;
  selected_model: string | null;
  /** prediction-visualization filters: feature name -> level */
  filters: Record<string, string>;
  /** predict-now form inputs: feature name -> raw input string */
  form_values: Record<string, string>;
  active_grouping: string | null;
  table_page: number;
  predictions_page: number;
}

export interface HistoryEntry {
  inputs: Record<string, string | number>;
  percentage: number;
  label: string;
}

export interface ViewData {
  datasets: DatasetInfo[];
  models: ModelInfo[];
  schema: SchemaResponse | null;
  summary: SummaryResponse | null;
  rows: RowsResponse | null;
  model: ModelDetails | null;
  model_predictions: PredictionsResponse | null;
  viz_predictions: PredictionsResponse | null;
  predict_result: PredictionRecord | null;
  history: HistoryEntry[];
  validation_errors: Record<string, string>;
  notice: string | null;
}

export function initialState(): ViewState {
  return {
    active_tab: "exploration",
    selected_dataset: null,
    selected_model: null,
    filters: {},
    form_values: {},
    active_grouping: null,
    table_page: 0,
    predictions_page: 0,
  };
}

export function initialData(): ViewData {
  return {
    datasets: [],
    models: [],
    schema: null,
    summary: null,
    rows: null,
    model: null,
    model_predictions: null,
    viz_predictions: null,
    predict_result: null,
    history: [],
    validation_errors: {},
    notice: null,
  };
}

export class Store {
  state: ViewState = initialState();
  data: ViewData = initialData();
  private listeners: (() => void)[] = [];

  subscribe(listener: () => void): () => void {
    this.listeners.push(listener);
    return () => {
      this.listeners = this.listeners.filter((l) => l !== listener);
    };
  }

  update(patchState: Partial<ViewState> = {}, patchData: Partial<ViewData> = {}): void {
    this.state = { ...this.state, ...patchState };
    this.data = { ...this.data, ...patchData };
    for (const listener of this.listeners) listener();
  }
}

/** The exploration groupings shown as chart tabs: the well-known five when
 * the schema has them, otherwise the first five schema features. */
export function groupingFeatures(schema: SchemaResponse | null): string[] {
  if (!schema) return [];
  const names = schema.schema.features.map((f) => f.name);
  const preferred = [
    "Within_City",
    "College_Admitted_To_Binary",
    "Religion_Binary",
    "Gender",
    "School_Type",
  ].filter((name) => names.includes(name));
  return preferred.length > 0 ? preferred : names.slice(0, 5);
}
