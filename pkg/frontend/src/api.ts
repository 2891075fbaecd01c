/** Typed client for the session API. Every state payload is version-checked. */

import type {
  CoarsenResponse,
  DatasetRegistered,
  ErrorBody,
  RefineResponse,
  SessionOpened,
  StatePayload,
  StateResponse,
} from "./types.js";

export const SUPPORTED_SCHEMA_VERSION = "1";

export class SchemaVersionError extends Error {
  constructor(public readonly got: string) {
    super(
      `server payload has schema version ${JSON.stringify(got)}, ` +
        `this client supports ${JSON.stringify(SUPPORTED_SCHEMA_VERSION)}`
    );
    this.name = "SchemaVersionError";
  }
}

export class ApiError extends Error {
  constructor(
    public readonly code: string,
    message: string,
    public readonly status: number,
    public readonly detail: unknown = null
  ) {
    super(message);
    this.name = "ApiError";
  }
}

export interface MinimalResponse {
  status: number;
  json(): Promise<unknown>;
}

export type FetchLike = (
  url: string,
  init?: { method?: string; headers?: Record<string, string>; body?: string }
) => Promise<MinimalResponse>;

function checkState(state: StatePayload): StatePayload {
  if (state.format_version !== SUPPORTED_SCHEMA_VERSION) {
    throw new SchemaVersionError(String(state.format_version));
  }
  return state;
}

export class NetmineClient {
  constructor(
    private readonly baseUrl: string,
    private readonly fetchImpl: FetchLike = (url, init) => fetch(url, init)
  ) {}

  private async request(method: string, path: string, body?: unknown): Promise<unknown> {
    const init: { method: string; headers?: Record<string, string>; body?: string } = {
      method,
    };
    if (body !== undefined) {
      init.headers = { "Content-Type": "application/json" };
      init.body = JSON.stringify(body);
    }
    const resp = await this.fetchImpl(`${this.baseUrl}${path}`, init);
    const parsed = (await resp.json()) as unknown;
    if (resp.status < 200 || resp.status >= 300) {
      const err = parsed as Partial<ErrorBody>;
      throw new ApiError(
        err.code ?? "UnknownError",
        err.message ?? `request failed with status ${resp.status}`,
        resp.status,
        err.detail ?? null
      );
    }
    return parsed;
  }

  async registerDataset(manifestPath: string): Promise<DatasetRegistered> {
    return (await this.request("POST", "/datasets", {
      manifest_path: manifestPath,
    })) as DatasetRegistered;
  }

  async openSession(
    dataset: string,
    opts: { seed?: number; replicates?: number; swaps_per_edge?: number; iterations?: number } = {}
  ): Promise<SessionOpened> {
    const opened = (await this.request("POST", "/sessions", {
      dataset,
      ...opts,
    })) as SessionOpened;
    checkState(opened.state);
    return opened;
  }

  async state(session: string): Promise<StatePayload> {
    const payload = (await this.request(
      "GET",
      `/sessions/${session}/state`
    )) as StatePayload;
    return checkState(payload);
  }

  async refine(session: string, clusters: number[]): Promise<RefineResponse> {
    const resp = (await this.request("POST", `/sessions/${session}/refine`, {
      clusters,
    })) as RefineResponse;
    checkState(resp.state);
    return resp;
  }

  async coarsen(session: string, targetK: number): Promise<CoarsenResponse> {
    const resp = (await this.request("POST", `/sessions/${session}/coarsen`, {
      target_k: targetK,
    })) as CoarsenResponse;
    checkState(resp.state);
    return resp;
  }

  async overlay(
    session: string,
    attribute: string,
    category: string | null = null,
    alpha = 0.05
  ): Promise<StateResponse> {
    const body: Record<string, unknown> = { attribute, alpha };
    if (category !== null) {
      body.category = category;
    }
    const resp = (await this.request(
      "POST",
      `/sessions/${session}/overlay`,
      body
    )) as StateResponse;
    checkState(resp.state);
    return resp;
  }

  async groups(
    session: string,
    labels: Record<string, string>,
    yearAttribute?: string
  ): Promise<StateResponse> {
    const body: Record<string, unknown> = { labels };
    if (yearAttribute !== undefined) {
      body.year_attribute = yearAttribute;
    }
    const resp = (await this.request(
      "POST",
      `/sessions/${session}/groups`,
      body
    )) as StateResponse;
    checkState(resp.state);
    return resp;
  }

  async undo(session: string): Promise<StateResponse> {
    const resp = (await this.request(
      "POST",
      `/sessions/${session}/undo`
    )) as StateResponse;
    checkState(resp.state);
    return resp;
  }

  async redo(session: string): Promise<StateResponse> {
    const resp = (await this.request(
      "POST",
      `/sessions/${session}/redo`
    )) as StateResponse;
    checkState(resp.state);
    return resp;
  }

  exportUrl(session: string, kind: "json" | "svg" | "csv"): string {
    return `${this.baseUrl}/sessions/${session}/export?kind=${kind}`;
  }
}
