/**
 * Typed client for the prediction service. The UI never computes predictions
 * itself: every displayed number comes from one of these responses.
 */

import type { FieldId } from "./bounds.js";

export type PredictRequest = Record<FieldId, number> & { margin: number };

export interface Interval {
  lower: number;
  upper: number;
  margin: number;
}

export interface PredictResponse {
  predicted_change: number;
  predicted_post_pain: number;
  interval: Interval;
  certainty_pct: number;
  model_info: { dict_edition: string; variant: string; bundle_hash: string };
  warning?: string;
}

export interface ModelInfo {
  model_loaded: boolean;
  variant?: string;
  features?: string[];
  certainty?: Record<string, number>;
  certainty_average?: Record<string, number>;
  evaluation?: Record<string, number>;
}

export interface HealthInfo {
  status: string;
  model_loaded: boolean;
  dict_hash: string | null;
}

export type PredictOutcome =
  | { kind: "ok"; data: PredictResponse }
  | { kind: "invalid"; message: string; fields: string[] }
  | { kind: "failure"; message: string };

type FetchLike = (url: string, init?: RequestInit) => Promise<Response>;

export class ApiClient {
  constructor(
    private readonly baseUrl: string = "",
    private readonly fetchFn: FetchLike = (url, init) => fetch(url, init),
  ) {}

  async predict(request: PredictRequest): Promise<PredictOutcome> {
    let response: Response;
    try {
      response = await this.fetchFn(`${this.baseUrl}/predict`, {
        method: "POST",
        headers: { "content-type": "application/json" },
        body: JSON.stringify(request),
      });
    } catch (err) {
      return { kind: "failure", message: `service unreachable: ${String(err)}` };
    }
    if (response.status === 422) {
      const body = (await response.json()) as { error?: string; fields?: string[] };
      return { kind: "invalid", message: body.error ?? "invalid input", fields: body.fields ?? [] };
    }
    if (!response.ok) {
      return { kind: "failure", message: `service error (${response.status})` };
    }
    return { kind: "ok", data: (await response.json()) as PredictResponse };
  }

  async model(): Promise<ModelInfo | null> {
    try {
      const response = await this.fetchFn(`${this.baseUrl}/model`);
      if (!response.ok) return null;
      return (await response.json()) as ModelInfo;
    } catch {
      return null;
    }
  }

  async health(): Promise<HealthInfo | null> {
    try {
      const response = await this.fetchFn(`${this.baseUrl}/health`);
      if (!response.ok) return null;
      return (await response.json()) as HealthInfo;
    } catch {
      return null;
    }
  }
}

/** Base URL override: ?api=http://host:port wins, else same origin. */
export function resolveBaseUrl(search: string): string {
  const fromQuery = new URLSearchParams(search).get("api");
  return fromQuery ? fromQuery.replace(/\/+$/, "") : "";
}
