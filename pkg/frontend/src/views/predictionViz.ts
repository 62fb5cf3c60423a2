/** Prediction Visualization tab: filterable view of the model's predictions
 * over a dataset. Shows predicted enrol / not-enrol record counts plus a
 * per-attribute breakdown; every number is a tally of records returned by
 * the /predictions endpoint. Filter edits re-query the server. */

import type { PredictionsResponse, SchemaFeature } from "../api";
import { barChart, el } from "../dom";
import type { ViewData, ViewState } from "../state";

export interface PredictionVizHandlers {
  setFilter(feature: string, level: string | null): void;
}

function binaryFeatures(data: ViewData): SchemaFeature[] {
  const schema = data.model?.schema ?? data.schema?.schema ?? null;
  if (!schema) return [];
  return schema.features.filter((f) => f.kind === "binary_categorical");
}

function filterControls(
  state: ViewState,
  data: ViewData,
  handlers: PredictionVizHandlers,
): HTMLElement {
  const controls = el("div", { class: "filter-controls" });
  for (const feature of binaryFeatures(data)) {
    const current = state.filters[feature.name] ?? "";
    const select = el(
      "select",
      {
        "data-filter": feature.name,
        onchange: (event: Event) => {
          const value = (event.target as HTMLSelectElement).value;
          handlers.setFilter(feature.name, value === "" ? null : value);
        },
      },
      el("option", { value: "", selected: current === "" }, "(any)"),
      (feature.levels ?? []).map((level) =>
        el("option", { value: level, selected: current === level }, level),
      ),
    );
    select.value = current;
    controls.append(el("label", { class: "filter-control" }, `${feature.name}: `, select));
  }
  return controls;
}

function labelCounts(predictions: PredictionsResponse): { enrolled: number; notEnrolled: number } {
  let enrolled = 0;
  for (const record of predictions.records) {
    if (record.label === "enrolled") enrolled += 1;
  }
  return { enrolled, notEnrolled: predictions.records.length - enrolled };
}

function breakdown(predictions: PredictionsResponse, features: SchemaFeature[]): HTMLElement {
  const panel = el("div", { class: "breakdown-panel" });
  for (const feature of features) {
    const tally = new Map<string, { enrolled: number; total: number }>();
    for (const level of feature.levels ?? []) tally.set(level, { enrolled: 0, total: 0 });
    for (const record of predictions.records) {
      const value = String(record.feature_values[feature.name] ?? "");
      const cell = tally.get(value);
      if (!cell) continue;
      cell.total += 1;
      if (record.label === "enrolled") cell.enrolled += 1;
    }
    panel.append(
      el(
        "div",
        { class: "breakdown", "data-feature": feature.name },
        el("h4", {}, feature.name),
        el(
          "table",
          { class: "breakdown-table" },
          el(
            "thead",
            {},
            el(
              "tr",
              {},
              el("th", {}, "level"),
              el("th", {}, "predicted enrol"),
              el("th", {}, "predicted not enrol"),
            ),
          ),
          el(
            "tbody",
            {},
            [...tally.entries()].map(([level, cell]) =>
              el(
                "tr",
                { "data-level": level },
                el("td", {}, level),
                el("td", { class: "count-enrolled" }, String(cell.enrolled)),
                el("td", { class: "count-not-enrolled" }, String(cell.total - cell.enrolled)),
              ),
            ),
          ),
        ),
      ),
    );
  }
  return panel;
}

export function renderPredictionViz(
  state: ViewState,
  data: ViewData,
  handlers: PredictionVizHandlers,
): HTMLElement {
  const root = el("section", { class: "view prediction-viz" });
  if (!state.selected_model) {
    root.append(el("p", { class: "placeholder" }, "Pick a model on the Model Details tab first."));
    return root;
  }
  root.append(filterControls(state, data, handlers));
  const predictions = data.viz_predictions;
  if (!predictions) {
    root.append(el("p", { class: "loading" }, "Loading predictions…"));
    return root;
  }
  if (predictions.records.length === 0) {
    root.append(
      el("p", { class: "empty-state" }, "No records match the current filters."),
      barChart([
        { label: "predicted enrol", count: 0 },
        { label: "predicted not enrol", count: 0 },
      ]),
    );
    return root;
  }
  const counts = labelCounts(predictions);
  root.append(
    el(
      "div",
      { class: "label-counts", "data-count": predictions.count },
      barChart([
        { label: "predicted enrol", count: counts.enrolled },
        { label: "predicted not enrol", count: counts.notEnrolled },
      ]),
      el(
        "p",
        { class: "counts-line" },
        `${predictions.count} records, ${counts.enrolled} predicted to enrol`,
      ),
    ),
  );
  root.append(breakdown(predictions, binaryFeatures(data)));
  return root;
}
