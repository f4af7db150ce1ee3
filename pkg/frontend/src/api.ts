/**
 * Typed client for the tabletalk HTTP API.
 *
 * Every request goes through an injectable fetch so tests can swap in a
 * fake transport. Failure responses share one shape on the wire:
 * {"failure": {"kind": ..., "detail": ...}} and surface here as ApiError.
 */

export interface Failure {
  readonly kind: string;
  readonly detail: string;
}

export interface DatasetSummary {
  readonly id: string;
  readonly name: string;
  readonly rows: number;
  readonly columns: number;
  readonly size: string;
}

export interface ProfileResponse {
  readonly id: string;
  readonly profile: string;
  readonly level: number;
  readonly tokens: number;
}

export interface PlanStep {
  readonly index: number;
  readonly rationale: string;
  readonly op: string;
  readonly result: string;
}

export interface AnswerValue {
  readonly kind: string;
  readonly value: unknown;
}

export interface QueryResponse {
  readonly dataset_id: string;
  readonly plan: readonly PlanStep[];
  readonly answer: AnswerValue;
  readonly answer_text: string;
}

export class ApiError extends Error {
  readonly status: number;
  readonly failure: Failure;

  constructor(status: number, failure: Failure) {
    super(`${failure.kind}: ${failure.detail}`);
    this.name = "ApiError";
    this.status = status;
    this.failure = failure;
  }
}

export type FetchLike = (input: string, init?: RequestInit) => Promise<Response>;

async function failureFrom(response: Response): Promise<Failure> {
  try {
    const body = (await response.json()) as { failure?: Failure };
    if (body.failure && typeof body.failure.kind === "string") {
      return body.failure;
    }
  } catch {
    // fall through to the generic shape
  }
  return { kind: "http-error", detail: `status ${response.status}` };
}

export class ApiClient {
  private readonly base: string;
  private readonly doFetch: FetchLike;

  constructor(baseUrl = "", fetchLike?: FetchLike) {
    this.base = baseUrl.replace(/\/+$/, "");
    this.doFetch = fetchLike ?? ((input, init) => fetch(input, init));
  }

  private url(path: string): string {
    return `${this.base}${path}`;
  }

  private async request(path: string, init?: RequestInit): Promise<Response> {
    const response = await this.doFetch(this.url(path), init);
    if (!response.ok) {
      throw new ApiError(response.status, await failureFrom(response));
    }
    return response;
  }

  async uploadDataset(name: string, content: string): Promise<DatasetSummary> {
    const response = await this.request("/datasets", {
      method: "POST",
      headers: {
        "content-type": "text/csv",
        "x-dataset-name": name,
      },
      body: content,
    });
    return (await response.json()) as DatasetSummary;
  }

  async listDatasets(): Promise<DatasetSummary[]> {
    const response = await this.request("/datasets");
    return (await response.json()) as DatasetSummary[];
  }

  async fetchProfile(datasetId: string, budget?: number): Promise<ProfileResponse> {
    const query = budget === undefined ? "" : `?budget=${budget}`;
    const response = await this.request(
      `/datasets/${encodeURIComponent(datasetId)}/profile${query}`,
    );
    return (await response.json()) as ProfileResponse;
  }

  async query(datasetId: string, question: string): Promise<QueryResponse> {
    const response = await this.request("/query", {
      method: "POST",
      headers: { "content-type": "application/json" },
      body: JSON.stringify({ dataset_id: datasetId, question }),
    });
    return (await response.json()) as QueryResponse;
  }
}
