/** Predict Now tab: one input per model feature (dropdowns for binary
 * levels, number boxes for numerics), a submit button, and the returned
 * enrolment likelihood displayed prominently. Validation runs before any
 * request; incomplete submissions never reach the server. Previous results
 * collect in a session history for what-if comparison.
 *
 * The displayed percentage is the API's PredictionRecord.percentage
 * rendered as-is (one decimal, exactly as the server rounded it). */

import type { ModelDetails, SchemaFeature } from "../api";
import { el } from "../dom";
import type { ViewData, ViewState } from "../state";

export interface PredictNowHandlers {
  setFormValue(feature: string, value: string): void;
  submit(): void;
}

export interface ValidationResult {
  values: Record<string, string | number> | null;
  errors: Record<string, string>;
}

/** Pure input validation: every model feature filled, binary values among
 * the schema levels, numerics parseable and finite. */
export function validateForm(
  model: ModelDetails,
  formValues: Record<string, string>,
): ValidationResult {
  const byName = new Map(model.schema.features.map((f) => [f.name, f]));
  const errors: Record<string, string> = {};
  const values: Record<string, string | number> = {};
  for (const name of model.logistic.feature_names) {
    const feature = byName.get(name);
    const raw = (formValues[name] ?? "").trim();
    if (raw === "") {
      errors[name] = "required";
      continue;
    }
    if (feature && feature.kind === "binary_categorical") {
      if (!feature.levels || !feature.levels.includes(raw)) {
        errors[name] = "pick one of the listed values";
        continue;
      }
      values[name] = raw;
    } else {
      const parsed = Number(raw);
      if (!Number.isFinite(parsed)) {
        errors[name] = "must be a number";
        continue;
      }
      values[name] = parsed;
    }
  }
  return Object.keys(errors).length > 0 ? { values: null, errors } : { values, errors: {} };
}

function featureInput(
  feature: SchemaFeature,
  value: string,
  error: string | undefined,
  handlers: PredictNowHandlers,
): HTMLElement {
  let input: HTMLElement;
  if (feature.kind === "binary_categorical") {
    const select = el(
      "select",
      {
        "data-feature": feature.name,
        onchange: (event: Event) =>
          handlers.setFormValue(feature.name, (event.target as HTMLSelectElement).value),
      },
      el("option", { value: "", selected: value === "" }, "— choose —"),
      (feature.levels ?? []).map((level) =>
        el("option", { value: level, selected: value === level }, level),
      ),
    );
    select.value = value;
    input = select;
  } else {
    input = el("input", {
      type: "number",
      "data-feature": feature.name,
      value,
      oninput: (event: Event) =>
        handlers.setFormValue(feature.name, (event.target as HTMLInputElement).value),
    });
  }
  return el(
    "div",
    { class: `form-field${error ? " invalid" : ""}` },
    el("label", {}, feature.name, input),
    error ? el("span", { class: "field-error", "data-error-for": feature.name }, error) : null,
  );
}

function resultPanel(data: ViewData): HTMLElement {
  const result = data.predict_result;
  if (!result) return el("div", { class: "result-panel empty" });
  const enrolled = result.label === "enrolled";
  return el(
    "div",
    { class: "result-panel" },
    el(
      "p",
      { class: "likelihood", "data-percentage": result.percentage },
      el("span", { class: "likelihood-value" }, `${result.percentage.toFixed(1)}%`),
      ` likelihood to ${enrolled ? "pursue" : "not pursue"} enrolment`,
    ),
    el("p", { class: `verdict ${result.label}` }, enrolled ? "enrolled" : "not_enrolled"),
  );
}

function historyList(data: ViewData): HTMLElement {
  if (data.history.length === 0) return el("div", { class: "history empty" });
  return el(
    "div",
    { class: "history" },
    el("h3", {}, "Session history"),
    el(
      "ol",
      { class: "history-list" },
      data.history.map((entry) =>
        el(
          "li",
          { "data-percentage": entry.percentage },
          `${entry.percentage.toFixed(1)}% (${entry.label}) — ` +
            Object.entries(entry.inputs)
              .map(([k, v]) => `${k}=${v}`)
              .join(", "),
        ),
      ),
    ),
  );
}

export function renderPredictNow(
  state: ViewState,
  data: ViewData,
  handlers: PredictNowHandlers,
): HTMLElement {
  const root = el("section", { class: "view predict-now" });
  if (!state.selected_model) {
    root.append(el("p", { class: "placeholder" }, "Pick a model on the Model Details tab first."));
    return root;
  }
  const model = data.model;
  if (!model) {
    root.append(el("p", { class: "loading" }, "Loading model…"));
    return root;
  }
  const byName = new Map(model.schema.features.map((f) => [f.name, f]));
  const form = el(
    "form",
    {
      class: "predict-form",
      onsubmit: (event: Event) => {
        event.preventDefault();
        handlers.submit();
      },
    },
    model.logistic.feature_names.map((name) => {
      const feature = byName.get(name);
      if (!feature) return null;
      return featureInput(
        feature,
        state.form_values[name] ?? "",
        data.validation_errors[name],
        handlers,
      );
    }),
    el("button", { type: "submit", class: "predict-submit" }, "Predict Now"),
  );
  root.append(
    el(
      "div",
      { class: "predict-layout" },
      el("div", { class: "predict-left" }, form),
      el("div", { class: "predict-right" }, resultPanel(data), historyList(data)),
    ),
  );
  return root;
}
