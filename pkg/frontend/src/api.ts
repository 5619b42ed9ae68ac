// Thin typed client for the qspec service; the fetch implementation is
// injectable so tests can replay recorded payloads.

import type {
  JobStateJson,
  SweepDefJson,
} from "./types";

export interface FetchResponseLike {
  ok: boolean;
  status: number;
  json(): Promise<unknown>;
}

export type FetchLike = (url: string, init?: {
  method?: string;
  headers?: Record<string, string>;
  body?: string;
}) => Promise<FetchResponseLike>;

export class ServiceError extends Error {
  constructor(public status: number, message: string) {
    super(message);
  }
}

export type SliceQuery = Record<string, string | number | boolean | undefined>;

export function buildSliceUrl(base: string, jobId: string, query: SliceQuery): string {
  const params = new URLSearchParams();
  const keys = Object.keys(query).sort(); // deterministic request URLs
  for (const key of keys) {
    const value = query[key];
    if (value !== undefined) {
      params.append(key, String(value));
    }
  }
  return `${base}/v1/sweep/${jobId}/slice?${params.toString()}`;
}

export class ServiceClient {
  constructor(private base: string, private fetchFn: FetchLike) {}

  private async request(url: string, init?: Parameters<FetchLike>[1]): Promise<unknown> {
    const response = await this.fetchFn(url, init);
    const body = await response.json();
    if (!response.ok) {
      const detail = (body as { detail?: string }).detail ?? `HTTP ${response.status}`;
      throw new ServiceError(response.status, detail);
    }
    return body;
  }

  health(): Promise<unknown> {
    return this.request(`${this.base}/v1/health`);
  }

  async submitSweep(def: SweepDefJson): Promise<string> {
    const body = await this.request(`${this.base}/v1/sweep`, {
      method: "POST",
      headers: { "content-type": "application/json" },
      body: JSON.stringify(def),
    });
    return (body as { job_id: string }).job_id;
  }

  jobState(jobId: string): Promise<JobStateJson> {
    return this.request(`${this.base}/v1/sweep/${jobId}`) as Promise<JobStateJson>;
  }

  slice(jobId: string, query: SliceQuery): Promise<unknown> {
    return this.request(buildSliceUrl(this.base, jobId, query));
  }
}
