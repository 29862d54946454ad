import type {
  CaseRecord,
  Catalog,
  DifferentialPayload,
  Findings,
  PhaseName,
  SessionState,
  SessionSummary,
} from './types';

export class ApiError extends Error {
  constructor(
    public code: string,
    message: string,
    public detail: unknown = null,
    public status = 0
  ) {
    super(message);
    this.name = 'ApiError';
  }

  get isNetwork(): boolean {
    return this.status === 0;
  }
}

/** Thin typed client over the consultation HTTP API. */
export class ApiClient {
  constructor(public readonly baseUrl: string) {}

  private async request<T>(path: string, init?: RequestInit): Promise<T> {
    let response: Response;
    try {
      response = await fetch(this.baseUrl + path, init);
    } catch (err) {
      throw new ApiError('network', `service unreachable: ${String(err)}`);
    }
    const text = await response.text();
    let body: unknown = null;
    if (text) {
      try {
        body = JSON.parse(text);
      } catch {
        throw new ApiError('bad_response', 'service returned non-JSON', text, response.status);
      }
    }
    if (!response.ok) {
      const err = (body ?? {}) as { code?: string; message?: string; detail?: unknown };
      throw new ApiError(
        err.code ?? `http_${response.status}`,
        err.message ?? response.statusText,
        err.detail ?? null,
        response.status
      );
    }
    return body as T;
  }

  private post<T>(path: string, payload?: unknown): Promise<T> {
    return this.request<T>(path, {
      method: 'POST',
      headers: { 'content-type': 'application/json' },
      body: payload === undefined ? undefined : JSON.stringify(payload),
    });
  }

  getCatalog(): Promise<Catalog> {
    return this.request<Catalog>('/catalog');
  }

  createSession(patientId: string): Promise<SessionSummary> {
    return this.post<SessionSummary>('/sessions', { patient_id: patientId });
  }

  getSession(sessionId: string): Promise<SessionState> {
    return this.request<SessionState>(`/sessions/${sessionId}`);
  }

  submitPhase(
    sessionId: string,
    phase: PhaseName,
    findings: Findings
  ): Promise<DifferentialPayload> {
    return this.post<DifferentialPayload>(`/sessions/${sessionId}/phases/${phase}`, {
      findings,
    });
  }

  getDifferential(sessionId: string): Promise<DifferentialPayload> {
    return this.request<DifferentialPayload>(`/sessions/${sessionId}/differential`);
  }

  finalize(sessionId: string): Promise<CaseRecord> {
    return this.post<CaseRecord>(`/sessions/${sessionId}/finalize`);
  }

  differentialUrl(sessionId: string): string {
    return `${this.baseUrl}/sessions/${sessionId}/differential`;
  }
}
