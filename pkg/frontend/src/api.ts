/** Thin client over the scenario engine's HTTP JSON API. */

import type {
  FacilitiesPayload,
  FieldError,
  NetworkPayload,
  RunStatus,
  ScenarioRequest,
} from "./types.js";

export class ApiValidationError extends Error {
  readonly errors: FieldError[];

  constructor(errors: FieldError[]) {
    super(errors.map((e) => `${e.field}: ${e.message}`).join("; "));
    this.name = "ApiValidationError";
    this.errors = errors;
  }
}

type FetchLike = (url: string, init?: RequestInit) => Promise<Response>;

function parse422(detail: unknown): FieldError[] {
  if (!Array.isArray(detail)) return [{ field: "", message: String(detail) }];
  return detail.map((item) => {
    const loc = Array.isArray(item?.loc) ? item.loc.filter((p: unknown) => p !== "body") : [];
    return { field: loc.length ? String(loc[0]) : "", message: String(item?.msg ?? "") };
  });
}

export class DashboardApi {
  constructor(
    private readonly baseUrl: string = "",
    private readonly fetchFn: FetchLike = (url, init) => fetch(url, init),
  ) {}

  private async getJson<T>(path: string): Promise<T> {
    const resp = await this.fetchFn(`${this.baseUrl}${path}`);
    if (!resp.ok) throw new Error(`GET ${path} failed: ${resp.status}`);
    return (await resp.json()) as T;
  }

  async submitScenario(body: ScenarioRequest): Promise<string> {
    const resp = await this.fetchFn(`${this.baseUrl}/scenarios`, {
      method: "POST",
      headers: { "content-type": "application/json" },
      body: JSON.stringify(body),
    });
    if (resp.status === 422) {
      const payload = await resp.json();
      throw new ApiValidationError(parse422(payload.detail));
    }
    if (!resp.ok && resp.status !== 202) {
      throw new Error(`POST /scenarios failed: ${resp.status}`);
    }
    const { id } = (await resp.json()) as { id: string };
    return id;
  }

  getScenario(runId: string): Promise<RunStatus> {
    return this.getJson<RunStatus>(`/scenarios/${runId}`);
  }

  async pollScenario(
    runId: string,
    opts: { intervalMs?: number; timeoutMs?: number } = {},
  ): Promise<RunStatus> {
    const interval = opts.intervalMs ?? 300;
    const deadline = Date.now() + (opts.timeoutMs ?? 120_000);
    for (;;) {
      const status = await this.getScenario(runId);
      if (status.status !== "running") return status;
      if (Date.now() > deadline) throw new Error(`run ${runId} timed out`);
      await new Promise((resolve) => setTimeout(resolve, interval));
    }
  }

  getNetwork(): Promise<NetworkPayload> {
    return this.getJson<NetworkPayload>("/network");
  }

  getParameters(): Promise<Record<string, unknown>> {
    return this.getJson("/parameters");
  }

  getFacilities(runId: string): Promise<FacilitiesPayload> {
    return this.getJson<FacilitiesPayload>(`/scenarios/${runId}/facilities`);
  }
}
