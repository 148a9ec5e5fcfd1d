/**
 * Typed client for the recommendation service.
 *
 * The UI is a pure client: every number it displays comes from one of
 * these response payloads, never from client-side recomputation.
 */

export interface RecommendationEntry {
  candidate: string;
  value: number;
  layer_contributions: number[];
  presented_count: number;
  state: string;
}

export interface SessionView {
  user: string;
  stage: 'Initial' | 'PostAdaptation';
  rated: boolean;
  presented: RecommendationEntry[];
  layer_kinds: string[];
  weights_current: number[];
}

export interface RatingsResponse {
  user: string;
  stage: string;
  weights_before: number[];
  weights_after: number[];
}

export class ApiError extends Error {
  constructor(public readonly status: number, message: string) {
    super(message);
    this.name = 'ApiError';
  }
}

async function parseError(response: Response): Promise<ApiError> {
  let detail = response.statusText;
  try {
    const body = (await response.json()) as { detail?: unknown };
    if (typeof body.detail === 'string') {
      detail = body.detail;
    }
  } catch {
    // keep the status text
  }
  return new ApiError(response.status, detail);
}

export class ApiClient {
  constructor(
    private readonly baseUrl: string = '',
    private readonly fetchFn: typeof fetch = fetch,
  ) {}

  private async get<T>(path: string): Promise<T> {
    const response = await this.fetchFn(`${this.baseUrl}${path}`);
    if (!response.ok) {
      throw await parseError(response);
    }
    return (await response.json()) as T;
  }

  private async post<T>(path: string, payload: unknown): Promise<T> {
    const response = await this.fetchFn(`${this.baseUrl}${path}`, {
      method: 'POST',
      headers: { 'Content-Type': 'application/json' },
      body: JSON.stringify(payload),
    });
    if (!response.ok) {
      throw await parseError(response);
    }
    return (await response.json()) as T;
  }

  getSession(user: string): Promise<SessionView> {
    return this.get<SessionView>(`/session/${encodeURIComponent(user)}`);
  }

  submitRatings(user: string, ratings: Record<string, number>): Promise<RatingsResponse> {
    return this.post<RatingsResponse>(
      `/session/${encodeURIComponent(user)}/ratings`,
      { ratings },
    );
  }
}
