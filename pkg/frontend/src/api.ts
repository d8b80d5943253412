import { AgentResponse, ApiError, ApiErrorBody, DeviceRecord } from "./types";

export type FetchLike = (input: string, init?: RequestInit) => Promise<Response>;

async function decode<T>(response: Response): Promise<T> {
  if (response.ok) {
    return (await response.json()) as T;
  }
  let body: ApiErrorBody = {
    code: "internal",
    message: `HTTP ${response.status}`,
    retryable: false,
  };
  try {
    const parsed = await response.json();
    if (parsed && parsed.error) body = parsed.error as ApiErrorBody;
  } catch {
    // non-JSON error body: keep the status-line fallback
  }
  throw new ApiError(response.status, body);
}

export class ApiClient {
  private readonly base: string;
  private readonly fetchImpl: FetchLike;

  constructor(base = "", fetchImpl: FetchLike = (...args) => fetch(...args)) {
    this.base = base.replace(/\/$/, "");
    this.fetchImpl = fetchImpl;
  }

  private post<T>(path: string, payload?: unknown): Promise<T> {
    return this.fetchImpl(this.base + path, {
      method: "POST",
      headers: { "Content-Type": "application/json" },
      body: payload === undefined ? undefined : JSON.stringify(payload),
    }).then((r) => decode<T>(r));
  }

  private get<T>(path: string): Promise<T> {
    return this.fetchImpl(this.base + path).then((r) => decode<T>(r));
  }

  async createSession(): Promise<string> {
    const body = await this.post<{ session_id: string }>("/api/sessions");
    return body.session_id;
  }

  chat(sessionId: string, prompt: string): Promise<AgentResponse> {
    return this.post(`/api/sessions/${encodeURIComponent(sessionId)}/chat`, { prompt });
  }

  getDevice(id: number): Promise<DeviceRecord> {
    return this.get(`/api/devices/${id}`);
  }

  async getSamples(): Promise<string[]> {
    const body = await this.get<{ samples: string[] }>("/api/samples");
    return body.samples;
  }
}
