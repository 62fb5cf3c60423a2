/** Data Exploration tab: dataset upload/selection, a paged table of the
 * rows, and one bar chart per grouping feature. Counts come straight from
 * the /summary endpoint; the chart renders them verbatim. */

import { barChart, el, pager } from "../dom";
import { groupingFeatures, type ViewData, type ViewState } from "../state";

export interface ExplorationHandlers {
  selectDataset(datasetId: string): void;
  upload(data: File, schema: File): void;
  selectGrouping(feature: string): void;
  setTablePage(page: number): void;
  trainModel(): void;
}

function uploadForm(handlers: ExplorationHandlers): HTMLElement {
  const dataInput = el("input", { type: "file", accept: ".csv", class: "upload-data" });
  const schemaInput = el("input", { type: "file", accept: ".json", class: "upload-schema" });
  const button = el(
    "button",
    {
      class: "upload-submit",
      onclick: () => {
        const data = dataInput.files?.[0];
        const schema = schemaInput.files?.[0];
        if (data && schema) handlers.upload(data, schema);
      },
    },
    "Upload",
  );
  return el(
    "div",
    { class: "upload-form" },
    el("label", {}, "CSV ", dataInput),
    el("label", {}, "Schema ", schemaInput),
    button,
  );
}

function datasetPicker(state: ViewState, data: ViewData, handlers: ExplorationHandlers) {
  const picker = el(
    "select",
    {
      class: "dataset-picker",
      onchange: (event: Event) =>
        handlers.selectDataset((event.target as HTMLSelectElement).value),
    },
    el("option", { value: "", selected: state.selected_dataset === null }, "— choose a dataset —"),
    data.datasets.map((info) =>
      el(
        "option",
        { value: info.dataset_id, selected: info.dataset_id === state.selected_dataset },
        `${info.dataset_id.slice(0, 12)}… (${info.rows ?? "?"} rows)`,
      ),
    ),
  );
  picker.value = state.selected_dataset ?? "";
  return picker;
}

function rowsTable(state: ViewState, data: ViewData, handlers: ExplorationHandlers): HTMLElement {
  const rows = data.rows;
  if (!rows) return el("p", { class: "loading" }, "Loading rows…");
  const pageCount = Math.ceil(rows.total / rows.limit);
  return el(
    "div",
    { class: "rows-table", "data-total": rows.total },
    el(
      "table",
      {},
      el(
        "thead",
        {},
        el("tr", {}, rows.columns.map((c) => el("th", {}, c))),
      ),
      el(
        "tbody",
        {},
        rows.rows.map((row) =>
          el(
            "tr",
            {},
            el("td", {}, row.id),
            rows.columns
              .slice(1, -1)
              .map((name) => el("td", {}, String(row.values[name] ?? ""))),
            el("td", {}, row.outcome),
          ),
        ),
      ),
    ),
    pager(state.table_page, pageCount, (page) => handlers.setTablePage(page)),
    el("p", { class: "table-total" }, `${rows.total} applicants`),
  );
}

function summaryChart(state: ViewState, data: ViewData, handlers: ExplorationHandlers) {
  const groupings = groupingFeatures(data.schema);
  const tabs = el(
    "div",
    { class: "grouping-tabs" },
    groupings.map((feature) =>
      el(
        "button",
        {
          class: `grouping-tab${feature === state.active_grouping ? " active" : ""}`,
          "data-grouping": feature,
          onclick: () => handlers.selectGrouping(feature),
        },
        feature,
      ),
    ),
  );
  const summary = data.summary;
  const body =
    summary && summary.by === state.active_grouping
      ? el(
          "div",
          { class: "summary-chart", "data-feature": summary.by, "data-total": summary.total },
          barChart(summary.groups),
          el("p", { class: "summary-total" }, `total ${summary.total}`),
        )
      : el("p", { class: "loading" }, "Loading summary…");
  return el("div", { class: "summary-panel" }, tabs, body);
}

export function renderExploration(
  state: ViewState,
  data: ViewData,
  handlers: ExplorationHandlers,
): HTMLElement {
  const root = el("section", { class: "view exploration" });
  root.append(
    el(
      "div",
      { class: "toolbar" },
      datasetPicker(state, data, handlers),
      uploadForm(handlers),
      state.selected_dataset
        ? el(
            "button",
            { class: "train-button", onclick: () => handlers.trainModel() },
            "Train model (defaults)",
          )
        : null,
    ),
  );
  if (!state.selected_dataset) {
    root.append(
      el(
        "p",
        { class: "placeholder" },
        "Upload a dataset (CSV + schema JSON) or pick one to explore it.",
      ),
    );
    return root;
  }
  root.append(summaryChart(state, data, handlers));
  root.append(rowsTable(state, data, handlers));
  return root;
}
