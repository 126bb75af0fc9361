/** Typed fetch layer. The fetch function is injectable so contract tests
 * can run against recorded fixtures without a network or a DOM. */

import type {
  ApiErrorBody,
  Forecast,
  ScenarioRequest,
  ScenarioResult,
  Series,
  Station,
} from "./types.js";

export type FetchLike = (url: string, init?: RequestInit) => Promise<Response>;

export class ApiError extends Error {
  constructor(
    readonly status: number,
    readonly body: ApiErrorBody,
  ) {
    super(`${status}: ${body.detail}`);
  }
}

export interface ClientOptions {
  baseUrl?: string;
  fetchFn?: FetchLike;
}

export class ApiClient {
  readonly baseUrl: string;
  private readonly fetchFn: FetchLike;
  /** every request this client made, for contract assertions */
  readonly requestLog: string[] = [];

  constructor(options: ClientOptions = {}) {
    this.baseUrl = (options.baseUrl ?? "").replace(/\/$/, "");
    this.fetchFn = options.fetchFn ?? fetch.bind(globalThis);
  }

  private async get<T>(path: string): Promise<T> {
    this.requestLog.push(path);
    const response = await this.fetchFn(`${this.baseUrl}${path}`);
    if (!response.ok) {
      throw new ApiError(response.status, (await response.json()) as ApiErrorBody);
    }
    return (await response.json()) as T;
  }

  stations(): Promise<Station[]> {
    return this.get<Station[]>("/stations");
  }

  window(station: string, variable: string, days = 7): Promise<Series> {
    const params = new URLSearchParams({ station, variable, days: String(days) });
    return this.get<Series>(`/window?${params}`);
  }

  history(station: string, variable: string, from: string, to: string): Promise<Series> {
    const params = new URLSearchParams({ station, variable, from, to });
    return this.get<Series>(`/history?${params}`);
  }

  forecast(station: string, variable: string, horizon: number): Promise<Forecast> {
    const params = new URLSearchParams({
      station,
      variable,
      horizon: String(horizon),
    });
    return this.get<Forecast>(`/forecast?${params}`);
  }

  /** POST /scenario. The body is serialized with serializeScenario so the
   * wire bytes are stable and testable. */
  async scenario(request: ScenarioRequest): Promise<ScenarioResult> {
    const path = "/scenario";
    this.requestLog.push(path);
    const response = await this.fetchFn(`${this.baseUrl}${path}`, {
      method: "POST",
      headers: { "Content-Type": "application/json" },
      body: serializeScenario(request),
    });
    if (!response.ok) {
      throw new ApiError(response.status, (await response.json()) as ApiErrorBody);
    }
    return (await response.json()) as ScenarioResult;
  }
}

/** Canonical scenario body: fixed key order, plain JSON numbers. */
export function serializeScenario(request: ScenarioRequest): string {
  return JSON.stringify({
    station: request.station,
    horizon: request.horizon,
    multipliers: request.multipliers,
    offsets: request.offsets,
  });
}
