/** The dashboard controller: owns the store, talks to the API, re-renders
 * the active view on every state change. Views stay pure; all effects
 * (fetches, response application) live here. In-flight responses that a
 * newer request supersedes are discarded (last write wins). */

import { ApiClient, RequestFailed, RequestTracker } from "./api";
import { el, clear } from "./dom";
import {
  Store,
  TABS,
  groupingFeatures,
  type TabName,
  type ViewState,
} from "./state";
import { renderExploration, type ExplorationHandlers } from "./views/exploration";
import { renderModelDetails, type ModelDetailsHandlers } from "./views/modelDetails";
import { renderPredictionViz, type PredictionVizHandlers } from "./views/predictionViz";
import { renderPredictNow, validateForm, type PredictNowHandlers } from "./views/predictNow";

const TABLE_PAGE_SIZE = 25;

export class Dashboard
  implements ExplorationHandlers, ModelDetailsHandlers, PredictionVizHandlers, PredictNowHandlers
{
  readonly store = new Store();
  private readonly tracker = new RequestTracker();

  constructor(
    private readonly api: ApiClient,
    private readonly root: HTMLElement,
    private readonly pollIntervalMs = 1000,
  ) {
    this.store.subscribe(() => this.render());
  }

  async start(): Promise<void> {
    this.render();
    await Promise.all([this.refreshDatasets(), this.refreshModels()]);
  }

  // ---- effects ----------------------------------------------------------

  private async guarded<T>(slot: string, work: () => Promise<T>, apply: (value: T) => void) {
    const id = this.tracker.issue(slot);
    try {
      const value = await work();
      if (this.tracker.isCurrent(slot, id)) apply(value);
    } catch (error) {
      if (!this.tracker.isCurrent(slot, id)) return;
      const message =
        error instanceof RequestFailed ? error.message : `request failed: ${String(error)}`;
      this.store.update({}, { notice: message });
    }
  }

  refreshDatasets(): Promise<void> {
    return this.guarded(
      "datasets",
      () => this.api.listDatasets(),
      (body) => this.store.update({}, { datasets: body.datasets }),
    );
  }

  refreshModels(): Promise<void> {
    return this.guarded(
      "models",
      () => this.api.listModels(),
      (body) => this.store.update({}, { models: body.models }),
    );
  }

  private loadSchema(datasetId: string): Promise<void> {
    return this.guarded(
      "schema",
      () => this.api.datasetSchema(datasetId),
      (schema) => {
        this.store.update({}, { schema });
        const groupings = groupingFeatures(schema);
        if (groupings.length > 0) this.selectGrouping(groupings[0]);
      },
    );
  }

  private loadSummary(datasetId: string, feature: string): Promise<void> {
    return this.guarded(
      "summary",
      () => this.api.datasetSummary(datasetId, feature),
      (summary) => this.store.update({}, { summary }),
    );
  }

  private loadRows(datasetId: string, page: number): Promise<void> {
    return this.guarded(
      "rows",
      () => this.api.datasetRows(datasetId, page * TABLE_PAGE_SIZE, TABLE_PAGE_SIZE),
      (rows) => this.store.update({}, { rows }),
    );
  }

  private loadModel(modelId: string): Promise<void> {
    return this.guarded(
      "model",
      () => this.api.modelDetails(modelId),
      (model) => {
        this.store.update({ form_values: {}, filters: {} }, { model, validation_errors: {} });
        this.loadModelPredictions(modelId, model.dataset_fingerprint);
        this.loadVizPredictions();
      },
    );
  }

  private loadModelPredictions(modelId: string, datasetId: string): Promise<void> {
    return this.guarded(
      "model_predictions",
      () => this.api.predictions(modelId, datasetId, {}),
      (predictions) => this.store.update({}, { model_predictions: predictions }),
    );
  }

  private loadVizPredictions(): Promise<void> {
    const { selected_model, filters } = this.store.state;
    const model = this.store.data.model;
    if (!selected_model || !model) return Promise.resolve();
    return this.guarded(
      "viz_predictions",
      () => this.api.predictions(selected_model, model.dataset_fingerprint, filters),
      (predictions) => this.store.update({}, { viz_predictions: predictions }),
    );
  }

  // ---- handlers (events from the views) ----------------------------------

  setTab(tab: TabName): void {
    this.store.update({ active_tab: tab });
  }

  selectDataset(datasetId: string): void {
    const selected = datasetId === "" ? null : datasetId;
    this.store.update(
      { selected_dataset: selected, table_page: 0, active_grouping: null },
      { schema: null, summary: null, rows: null },
    );
    if (!selected) return;
    this.loadSchema(selected);
    this.loadRows(selected, 0);
  }

  upload(data: File, schema: File): void {
    this.guarded(
      "upload",
      () => this.api.uploadDataset(data, schema),
      (body) => {
        this.store.update({}, { notice: `uploaded ${body.dataset_id} (${body.rows} rows)` });
        this.refreshDatasets().then(() => this.selectDataset(body.dataset_id));
      },
    );
  }

  selectGrouping(feature: string): void {
    this.store.update({ active_grouping: feature }, { summary: null });
    const dataset = this.store.state.selected_dataset;
    if (dataset) this.loadSummary(dataset, feature);
  }

  setTablePage(page: number): void {
    this.store.update({ table_page: page });
    const dataset = this.store.state.selected_dataset;
    if (dataset) this.loadRows(dataset, page);
  }

  /** Train-with-defaults: the only training control the dashboard offers. */
  trainModel(): void {
    const dataset = this.store.state.selected_dataset;
    if (!dataset) return;
    this.guarded(
      "train",
      () => this.api.startTraining(dataset, {}),
      (body) => {
        this.store.update({}, { notice: `training job started (${body.job_id})` });
        this.pollJob(body.job_id);
      },
    );
  }

  private pollJob(jobId: string): void {
    const poll = async () => {
      let status: { status: string; model_id?: string; error?: string };
      try {
        status = await this.api.jobStatus(jobId);
      } catch (error) {
        this.store.update({}, { notice: `job poll failed: ${String(error)}` });
        return;
      }
      if (status.status === "done" && status.model_id) {
        this.store.update({}, { notice: `training done: model ${status.model_id.slice(0, 12)}…` });
        await this.refreshModels();
        return;
      }
      if (status.status === "failed") {
        this.store.update({}, { notice: `training failed: ${status.error ?? "unknown"}` });
        return;
      }
      setTimeout(poll, this.pollIntervalMs);
    };
    void poll();
  }

  selectModel(modelId: string): void {
    const selected = modelId === "" ? null : modelId;
    this.store.update(
      { selected_model: selected, predictions_page: 0 },
      { model: null, model_predictions: null, viz_predictions: null, predict_result: null },
    );
    if (selected) this.loadModel(selected);
  }

  setPredictionsPage(page: number): void {
    this.store.update({ predictions_page: page });
  }

  setFilter(feature: string, level: string | null): void {
    const filters = { ...this.store.state.filters };
    if (level === null) delete filters[feature];
    else filters[feature] = level;
    this.store.update({ filters }, { viz_predictions: null });
    this.loadVizPredictions();
  }

  setFormValue(feature: string, value: string): void {
    this.store.update({ form_values: { ...this.store.state.form_values, [feature]: value } });
  }

  /** Validate first; an incomplete form renders inline errors and issues no
   * request. Returns whether a request was sent (the tests assert on it). */
  submit(): boolean {
    const model = this.store.data.model;
    const modelId = this.store.state.selected_model;
    if (!model || !modelId) return false;
    const { values, errors } = validateForm(model, this.store.state.form_values);
    if (!values) {
      this.store.update({}, { validation_errors: errors });
      return false;
    }
    this.store.update({}, { validation_errors: {} });
    this.guarded(
      "predict",
      () => this.api.predict(modelId, values),
      (record) =>
        this.store.update(
          {},
          {
            predict_result: record,
            history: [
              { inputs: values, percentage: record.percentage, label: record.label },
              ...this.store.data.history,
            ],
          },
        ),
    );
    return true;
  }

  // ---- rendering ---------------------------------------------------------

  render(): void {
    const { state, data } = this.store;
    clear(this.root);
    const tabs = el(
      "nav",
      { class: "tabs" },
      TABS.map(({ id, title }) =>
        el(
          "button",
          {
            class: `tab${state.active_tab === id ? " active" : ""}`,
            "data-tab": id,
            onclick: () => this.setTab(id),
          },
          title,
        ),
      ),
    );
    this.root.append(el("header", { class: "masthead" }, el("h1", {}, "enrollcast"), tabs));
    if (data.notice) {
      this.root.append(el("p", { class: "notice" }, data.notice));
    }
    this.root.append(this.renderActiveView(state));
  }

  private renderActiveView(state: ViewState): HTMLElement {
    switch (state.active_tab) {
      case "exploration":
        return renderExploration(state, this.store.data, this);
      case "model_details":
        return renderModelDetails(state, this.store.data, this);
      case "prediction_viz":
        return renderPredictionViz(state, this.store.data, this);
      case "predict_now":
        return renderPredictNow(state, this.store.data, this);
    }
  }
}
