/** Fetch-based client for the planning service. */

import type {
  Api,
  ActionsResponse,
  FuseResponse,
  IncidentSummary,
  JobResponse,
  ScoreResponse,
} from "./types.js";

/** The service answered with a non-2xx status. */
export class ApiError extends Error {
  constructor(
    public readonly status: number,
    public readonly detail: string,
  ) {
    super(detail);
    this.name = "ApiError";
  }
}

/** The service could not be reached at all. */
export class ConnectionError extends Error {
  constructor(message: string) {
    super(message);
    this.name = "ConnectionError";
  }
}

function detailText(payload: unknown, status: number): string {
  if (payload && typeof payload === "object" && "detail" in payload) {
    const detail = (payload as { detail: unknown }).detail;
    return typeof detail === "string" ? detail : JSON.stringify(detail);
  }
  return `service error (HTTP ${status})`;
}

export class ApiClient implements Api {
  constructor(private readonly baseUrl: string) {
    this.baseUrl = baseUrl.replace(/\/+$/, "");
  }

  private async request<T>(path: string, init?: RequestInit): Promise<T> {
    let response: Response;
    try {
      response = await fetch(this.baseUrl + path, init);
    } catch (err) {
      throw new ConnectionError(`cannot reach service at ${this.baseUrl}: ${err}`);
    }
    let payload: unknown = null;
    try {
      payload = await response.json();
    } catch {
      // non-JSON body; detailText falls back to the status line
    }
    if (!response.ok) {
      throw new ApiError(response.status, detailText(payload, response.status));
    }
    return payload as T;
  }

  private post<T>(path: string, body: unknown): Promise<T> {
    return this.request(path, {
      method: "POST",
      headers: { "content-type": "application/json" },
      body: JSON.stringify(body),
    });
  }

  getActions(): Promise<ActionsResponse> {
    return this.request("/actions");
  }

  getIncident(incidentId: string): Promise<IncidentSummary> {
    return this.request(`/incidents/${encodeURIComponent(incidentId)}`);
  }

  generatePlans(incidentId: string, m?: number): Promise<JobResponse> {
    return this.post("/plans/generate", { incident_id: incidentId, m: m ?? null });
  }

  getJob(jobId: string): Promise<JobResponse> {
    return this.request(`/jobs/${encodeURIComponent(jobId)}`);
  }

  scorePlan(bits: number[]): Promise<ScoreResponse> {
    return this.post("/plans/score", { bits });
  }

  fusePlans(plans: number[][]): Promise<FuseResponse> {
    return this.post("/plans/fuse", { plans });
  }
}
