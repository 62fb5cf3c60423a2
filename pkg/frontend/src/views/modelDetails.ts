/** Predictive Model Details tab: the metrics grid, the selected-feature
 * list with its merit, and a browsable prediction-results table.
 *
 * Every metric cell renders the API payload value verbatim; nothing is
 * recomputed or re-rounded client-side. */

import type { ClassMetrics, ModelDetails } from "../api";
import { el, pager } from "../dom";
import type { ViewData, ViewState } from "../state";

export interface ModelDetailsHandlers {
  selectModel(modelId: string): void;
  setPredictionsPage(page: number): void;
}

const METRIC_COLUMNS: { key: keyof ClassMetrics; title: string }[] = [
  { key: "tp_rate", title: "TP Rate" },
  { key: "fp_rate", title: "FP Rate" },
  { key: "precision", title: "Precision" },
  { key: "recall", title: "Recall" },
  { key: "f_measure", title: "F-Measure" },
  { key: "accuracy", title: "Accuracy" },
];

function metricsRow(scope: string, metrics: ClassMetrics, auc: number | null): HTMLElement {
  return el(
    "tr",
    { "data-scope": scope },
    el("td", {}, scope),
    METRIC_COLUMNS.map(({ key }) =>
      el("td", { class: "metric", "data-metric": key }, String(metrics[key])),
    ),
    el("td", { class: "metric", "data-metric": "auc" }, auc === null ? "—" : String(auc)),
  );
}

function metricsGrid(model: ModelDetails): HTMLElement {
  const holdout = model.evaluation.holdout;
  const cv = model.evaluation.cv;
  const rows: HTMLElement[] = [];
  if (holdout) {
    rows.push(metricsRow("holdout positive", holdout.positive, holdout.roc.auc));
    rows.push(metricsRow("holdout negative", holdout.negative, null));
    rows.push(metricsRow("holdout weighted", holdout.weighted, null));
  }
  if (cv) {
    rows.push(metricsRow(`${cv.k}-fold CV pooled`, cv.pooled, cv.pooled_auc));
  }
  return el(
    "table",
    { class: "metrics-grid" },
    el(
      "thead",
      {},
      el(
        "tr",
        {},
        el("th", {}, "Scope"),
        METRIC_COLUMNS.map(({ title }) => el("th", {}, title)),
        el("th", {}, "AUC"),
      ),
    ),
    el("tbody", {}, rows),
  );
}

function featureList(model: ModelDetails): HTMLElement {
  const selection = model.selected_subset;
  const names = selection ? selection.selected_names : model.logistic.feature_names;
  const merit = selection ? String(selection.merit) : "—";
  return el(
    "div",
    { class: "feature-panel" },
    el("h3", {}, selection ? "Selected features" : "Features (no selection run)"),
    el(
      "ul",
      { class: "feature-list" },
      names.map((name) => el("li", {}, name)),
    ),
    el(
      "p",
      { class: "merit-line" },
      "merit: ",
      el("span", { class: "merit-value", "data-merit": merit }, merit),
      selection ? ` (${selection.subsets_evaluated} subsets evaluated)` : "",
    ),
  );
}

function predictionsTable(
  state: ViewState,
  data: ViewData,
  handlers: ModelDetailsHandlers,
): HTMLElement {
  const predictions = data.model_predictions;
  if (!predictions) return el("p", { class: "loading" }, "Loading predictions…");
  const pageSize = 15;
  const pageCount = Math.ceil(predictions.records.length / pageSize);
  const start = state.predictions_page * pageSize;
  const visible = predictions.records.slice(start, start + pageSize);
  return el(
    "div",
    { class: "predictions-panel" },
    el("h3", {}, `Prediction results (${predictions.count} records)`),
    el(
      "table",
      { class: "predictions-table" },
      el(
        "thead",
        {},
        el(
          "tr",
          {},
          el("th", {}, "applicant"),
          el("th", {}, "probability"),
          el("th", {}, "percentage"),
          el("th", {}, "label"),
        ),
      ),
      el(
        "tbody",
        {},
        visible.map((record) =>
          el(
            "tr",
            {},
            el("td", {}, record.applicant_id),
            el("td", { "data-field": "probability" }, String(record.probability)),
            el("td", { "data-field": "percentage" }, record.percentage.toFixed(1)),
            el("td", { "data-field": "label" }, record.label),
          ),
        ),
      ),
    ),
    pager(state.predictions_page, pageCount, (page) => handlers.setPredictionsPage(page)),
  );
}

function modelPicker(state: ViewState, data: ViewData, handlers: ModelDetailsHandlers) {
  const picker = el(
    "select",
    {
      class: "model-picker",
      onchange: (event: Event) => handlers.selectModel((event.target as HTMLSelectElement).value),
    },
    el("option", { value: "", selected: state.selected_model === null }, "— choose a model —"),
    data.models.map((info) =>
      el(
        "option",
        { value: info.model_id, selected: info.model_id === state.selected_model },
        `${info.model_id.slice(0, 12)}… (${info.created_at || "no date"})`,
      ),
    ),
  );
  picker.value = state.selected_model ?? "";
  return picker;
}

export function renderModelDetails(
  state: ViewState,
  data: ViewData,
  handlers: ModelDetailsHandlers,
): HTMLElement {
  const root = el("section", { class: "view model-details" });
  root.append(el("div", { class: "toolbar" }, modelPicker(state, data, handlers)));
  if (!state.selected_model) {
    root.append(el("p", { class: "placeholder" }, "Pick a trained model to inspect it."));
    return root;
  }
  const model = data.model;
  if (!model) {
    root.append(el("p", { class: "loading" }, "Loading model…"));
    return root;
  }
  root.append(
    el(
      "p",
      { class: "model-meta" },
      `ridge ${model.logistic.ridge}, ${model.logistic.iterations_used} iterations, ` +
        `${model.logistic.converged ? "converged" : "not converged"}`,
    ),
  );
  root.append(metricsGrid(model));
  root.append(featureList(model));
  root.append(predictionsTable(state, data, handlers));
  return root;
}
