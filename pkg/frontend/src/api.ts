// Thin client for the /api/v1 JSON endpoints.
//
// The API key lives in memory only; it is never persisted. fetch is
// injectable so tests can run against a scripted server.

import { MaterialDoc, PlotLayout, Visibility } from './types';

export type FetchLike = (url: string, init?: RequestInit) => Promise<Response>;

export class ApiError extends Error {
  constructor(
    readonly status: number,
    readonly code: string,
    message: string,
  ) {
    super(message);
  }
}

async function raiseFor(response: Response): Promise<never> {
  let code = 'HttpError';
  let message = `${response.status}`;
  try {
    const body = (await response.json()) as {
      error?: { code?: string; message?: string };
    };
    if (body.error) {
      code = body.error.code ?? code;
      message = body.error.message ?? message;
    }
  } catch {
    // non-JSON error body: keep the status text
  }
  throw new ApiError(response.status, code, message);
}

export class ApiClient {
  private apiKey: string | undefined;

  constructor(
    readonly baseUrl: string,
    private readonly fetchImpl: FetchLike = (...args) => fetch(...args),
  ) {}

  setApiKey(key: string | undefined): void {
    this.apiKey = key && key.trim() ? key.trim() : undefined;
  }

  hasApiKey(): boolean {
    return this.apiKey !== undefined;
  }

  private headers(extra: Record<string, string> = {}): Record<string, string> {
    return this.apiKey ? { 'X-API-Key': this.apiKey, ...extra } : extra;
  }

  private async get<T>(path: string): Promise<T> {
    const response = await this.fetchImpl(`${this.baseUrl}${path}`, {
      headers: this.headers(),
    });
    if (!response.ok) await raiseFor(response);
    return (await response.json()) as T;
  }

  getMaterial(key: string): Promise<MaterialDoc> {
    return this.get(`/api/v1/materials/${encodeURIComponent(key)}`);
  }

  getProjects(): Promise<string[]> {
    return this.get('/api/v1/projects');
  }

  private async patch(cid: string, body: unknown): Promise<void> {
    const response = await this.fetchImpl(
      `${this.baseUrl}/api/v1/contributions/${encodeURIComponent(cid)}`,
      {
        method: 'PATCH',
        headers: this.headers({ 'Content-Type': 'application/json' }),
        body: JSON.stringify(body),
      },
    );
    if (!response.ok) await raiseFor(response);
  }

  setVisibility(cid: string, visibility: Visibility): Promise<void> {
    return this.patch(cid, { visibility });
  }

  customizePlot(
    cid: string,
    plotId: string,
    layout: Partial<PlotLayout>,
  ): Promise<void> {
    return this.patch(cid, { plot_customized: { plot_id: plotId, layout } });
  }
}
