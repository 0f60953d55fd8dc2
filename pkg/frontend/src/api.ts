import type {
  ApiErrorBody,
  DatasetSummary,
  PcpPayload,
  SamplePayload,
  SessionInfo,
  SessionSnapshot,
  SuggestPayload,
  ViewPayload,
} from "./types";

export type FetchLike = (
  input: string,
  init?: RequestInit
) => Promise<Response>;

/** Error carrying the service's machine-readable code. */
export class ApiError extends Error {
  constructor(
    readonly status: number,
    readonly code: string,
    message: string,
    readonly detail?: unknown
  ) {
    super(message);
  }
}

export class VersionConflictError extends ApiError {}

async function raiseFor(resp: Response): Promise<never> {
  let body: ApiErrorBody = { code: "unknown", message: resp.statusText };
  try {
    body = (await resp.json()) as ApiErrorBody;
  } catch {
    /* non-JSON error body; keep the fallback */
  }
  const cls = resp.status === 409 ? VersionConflictError : ApiError;
  throw new cls(resp.status, body.code, body.message, body.detail);
}

/**
 * Thin typed client for the session service. The fetch implementation
 * is injectable so tests can intercept every request and assert that
 * no statistic shown on screen was produced anywhere else.
 */
export class ApiClient {
  constructor(
    private readonly base: string,
    private readonly fetchFn: FetchLike = (input, init) => fetch(input, init)
  ) {}

  private async request<T>(path: string, init?: RequestInit): Promise<T> {
    const resp = await this.fetchFn(this.base + path, init);
    if (!resp.ok) await raiseFor(resp);
    return (await resp.json()) as T;
  }

  private post<T>(path: string, body: unknown, method = "POST"): Promise<T> {
    return this.request<T>(path, {
      method,
      headers: { "content-type": "application/json" },
      body: JSON.stringify(body),
    });
  }

  uploadDataset(csv: string): Promise<DatasetSummary> {
    return this.request<DatasetSummary>("/datasets", {
      method: "POST",
      headers: { "content-type": "text/csv" },
      body: csv,
    });
  }

  getDataset(id: string): Promise<DatasetSummary> {
    return this.request<DatasetSummary>(`/datasets/${id}`);
  }

  getFactor(datasetId: string, name: string): Promise<{ name: string; labels: string[] }> {
    return this.request(`/datasets/${datasetId}/factors/${name}`);
  }

  createSession(
    datasetId: string,
    seed: number
  ): Promise<{ id: string; version: number; n: number; m: number }> {
    return this.post("/sessions", { dataset_id: datasetId, seed });
  }

  getSession(id: string): Promise<SessionInfo> {
    return this.request<SessionInfo>(`/sessions/${id}`);
  }

  getView(id: string): Promise<ViewPayload> {
    return this.request<ViewPayload>(`/sessions/${id}/view`);
  }

  suggest(id: string, rows: number[], tau: number): Promise<SuggestPayload> {
    return this.post(`/sessions/${id}/suggest`, { rows, tau });
  }

  getPcp(id: string, rows: number[], tau: number): Promise<PcpPayload> {
    const params = new URLSearchParams({ rows: rows.join(","), tau: String(tau) });
    return this.request<PcpPayload>(`/sessions/${id}/pcp?${params}`);
  }

  commitTile(
    id: string,
    rows: number[],
    cols: number[],
    label: string,
    version: number
  ): Promise<{ version: number }> {
    return this.post(`/sessions/${id}/tiles`, { rows, cols, label, version });
  }

  deleteLastTile(id: string, version: number): Promise<{ version: number }> {
    return this.request(`/sessions/${id}/tiles/last?version=${version}`, {
      method: "DELETE",
    });
  }

  putHypothesis(
    id: string,
    rows: number[],
    partition: number[][],
    version: number
  ): Promise<{ version: number }> {
    return this.post(`/sessions/${id}/hypothesis`, { rows, partition, version }, "PUT");
  }

  getSample(id: string, which: 1 | 2, seed: number): Promise<SamplePayload> {
    return this.request<SamplePayload>(
      `/sessions/${id}/sample?which=${which}&seed=${seed}`
    );
  }

  getSnapshot(id: string): Promise<SessionSnapshot> {
    return this.request<SessionSnapshot>(`/sessions/${id}/snapshot`);
  }
}
