/** Typed client for the enrollcast HTTP JSON API.
 *
 * The dashboard talks to the server exclusively through this module; every
 * number it displays comes verbatim out of one of these response shapes.
 */

export interface DatasetInfo {
  dataset_id: string;
  rows: number | null;
  created_at: string;
}

export interface SummaryGroup {
  label: string;
  count: number;
}

export interface SummaryResponse {
  dataset_id: string;
  by: string;
  total: number;
  groups: SummaryGroup[];
}

export interface SchemaFeature {
  name: string;
  kind: "binary_categorical" | "numeric";
  levels?: [string, string];
}

export interface SchemaResponse {
  dataset_id: string;
  rows: number;
  schema: {
    features: SchemaFeature[];
    target: string;
    positive_label: string;
  };
}

export interface UploadResponse {
  dataset_id: string;
  rows: number;
  clean_report: {
    duplicates_removed: number;
    rows_dropped: number;
    cells_imputed: number;
  };
}

export interface RowsResponse {
  dataset_id: string;
  total: number;
  offset: number;
  limit: number;
  columns: string[];
  rows: {
    id: string;
    values: Record<string, string | number>;
    outcome: "enrolled" | "not_enrolled";
  }[];
}

export interface ClassMetrics {
  tp_rate: number;
  fp_rate: number;
  precision: number;
  recall: number;
  f_measure: number;
  accuracy: number;
  degenerate: boolean;
}

export interface ModelInfo {
  model_id: string;
  created_at: string;
}

export interface ModelDetails {
  model_id: string;
  created_at: string;
  dataset_fingerprint: string;
  schema: SchemaResponse["schema"];
  logistic: {
    feature_names: string[];
    ridge: number;
    iterations_used: number;
    converged: boolean;
  };
  selected_subset: {
    selected: number[];
    selected_names: string[];
    merit: number;
    subsets_evaluated: number;
    nodes_expanded: number;
    trace: [number[], number][];
  } | null;
  evaluation: {
    holdout: {
      confusion: { tp: number; fp: number; tn: number; fn: number };
      positive: ClassMetrics;
      negative: ClassMetrics;
      weighted: ClassMetrics;
      roc: { points: [number, number][]; auc: number };
      threshold: number;
    } | null;
    cv: {
      k: number;
      seed: number;
      per_fold: ClassMetrics[];
      pooled: ClassMetrics;
      pooled_auc: number;
      pooled_confusion: { tp: number; fp: number; tn: number; fn: number };
    } | null;
  };
}

export interface PredictionRecord {
  applicant_id: string;
  probability: number;
  percentage: number;
  label: "enrolled" | "not_enrolled";
  feature_values: Record<string, string | number>;
}

export interface PredictionsResponse {
  model_id: string;
  dataset_id: string;
  filters: Record<string, string>;
  count: number;
  records: PredictionRecord[];
}

export interface ApiError {
  code: string;
  message: string;
  field?: string;
}

export class RequestFailed extends Error {
  constructor(
    readonly status: number,
    readonly body: ApiError,
  ) {
    super(`${body.code}: ${body.message}`);
  }
}

type FetchLike = (input: string, init?: RequestInit) => Promise<Response>;

export class ApiClient {
  constructor(
    private readonly base: string = "",
    private readonly fetchFn: FetchLike = (input, init) => globalThis.fetch(input, init),
  ) {}

  private async request<T>(path: string, init?: RequestInit): Promise<T> {
    const response = await this.fetchFn(this.base + path, init);
    if (!response.ok) {
      let body: ApiError;
      try {
        body = (await response.json()) as ApiError;
      } catch {
        body = { code: "http_error", message: `HTTP ${response.status}` };
      }
      throw new RequestFailed(response.status, body);
    }
    return (await response.json()) as T;
  }

  listDatasets(): Promise<{ datasets: DatasetInfo[] }> {
    return this.request("/datasets");
  }

  datasetSchema(datasetId: string): Promise<SchemaResponse> {
    return this.request(`/datasets/${encodeURIComponent(datasetId)}/schema`);
  }

  datasetSummary(datasetId: string, by: string): Promise<SummaryResponse> {
    return this.request(
      `/datasets/${encodeURIComponent(datasetId)}/summary?by=${encodeURIComponent(by)}`,
    );
  }

  datasetRows(datasetId: string, offset = 0, limit = 25): Promise<RowsResponse> {
    return this.request(
      `/datasets/${encodeURIComponent(datasetId)}/rows?offset=${offset}&limit=${limit}`,
    );
  }

  uploadDataset(data: Blob, schema: Blob): Promise<UploadResponse> {
    const form = new FormData();
    form.append("data", data, "data.csv");
    form.append("schema", schema, "schema.json");
    return this.request("/datasets", { method: "POST", body: form });
  }

  listModels(): Promise<{ models: ModelInfo[] }> {
    return this.request("/models");
  }

  modelDetails(modelId: string): Promise<ModelDetails> {
    return this.request(`/models/${encodeURIComponent(modelId)}`);
  }

  predictions(
    modelId: string,
    datasetId: string | null,
    filters: Record<string, string>,
  ): Promise<PredictionsResponse> {
    const params = new URLSearchParams();
    if (datasetId) params.append("dataset", datasetId);
    for (const [name, level] of Object.entries(filters)) {
      params.append("filter", `${name}=${level}`);
    }
    const query = params.toString();
    return this.request(
      `/models/${encodeURIComponent(modelId)}/predictions${query ? "?" + query : ""}`,
    );
  }

  predict(
    modelId: string,
    featureValues: Record<string, string | number>,
  ): Promise<PredictionRecord> {
    return this.request(`/models/${encodeURIComponent(modelId)}/predict`, {
      method: "POST",
      headers: { "content-type": "application/json" },
      body: JSON.stringify({ feature_values: featureValues }),
    });
  }

  startTraining(datasetId: string, options: Record<string, unknown>): Promise<{ job_id: string }> {
    return this.request("/models", {
      method: "POST",
      headers: { "content-type": "application/json" },
      body: JSON.stringify({ dataset_id: datasetId, options }),
    });
  }

  jobStatus(jobId: string): Promise<{ status: string; model_id?: string; error?: string }> {
    return this.request(`/jobs/${encodeURIComponent(jobId)}`);
  }
}

/** Monotonic per-slot request ids; a response is applied only if no newer
 * request was issued for the same slot (last-write-wins, stale discarded). */
export class RequestTracker {
  private latest = new Map<string, number>();

  issue(slot: string): number {
    const id = (this.latest.get(slot) ?? 0) + 1;
    this.latest.set(slot, id);
    return id;
  }

  isCurrent(slot: string, id: number): boolean {
    return this.latest.get(slot) === id;
  }
}
