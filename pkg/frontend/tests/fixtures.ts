import type { Catalog, DifferentialPayload, SessionState } from '../src/types';

export const CATALOG: Catalog = {
  attributes: [
    {
      id: 'site_of_pain',
      phase: 'history',
      multi_valued: true,
      allowed_values: ['low_back', 'buttock', 'leg'],
    },
    {
      id: 'pain_at_rest',
      phase: 'history',
      multi_valued: false,
      allowed_values: ['yes', 'no'],
    },
    {
      id: 'slr_test',
      phase: 'examination',
      multi_valued: false,
      allowed_values: ['normal', 'positive'],
    },
    {
      id: 'mri_report',
      phase: 'investigation',
      multi_valued: false,
      allowed_values: ['normal', 'disc_bulge'],
    },
  ],
};

export const PAYLOAD: DifferentialPayload = {
  patient_id: 'pt-9',
  phases_performed: ['history', 'examination'],
  divisor_used: 3,
  epsilon: 0.02,
  differential: [
    {
      disease: 'd2',
      display_name: 'Discogenic Pain',
      chance: 0.9188,
      match_class_per_phase: { history: 'partial', examination: 'partial' },
    },
    {
      disease: 'd1',
      display_name: 'Facet Joint Arthropathy',
      chance: 0.9188,
      match_class_per_phase: { history: 'partial', examination: 'full' },
    },
    {
      disease: 'd3',
      display_name: 'Sacroiliac Joint Arthropathy',
      chance: 0.6638,
      match_class_per_phase: { history: 'partial', examination: 'partial' },
    },
  ],
  conflicts: [
    {
      group: ['d1', 'd2'],
      resolved: true,
      joints: { d1: 0.0912384, d2: 0.1213056 },
      order: ['d2', 'd1'],
      tie: false,
      reason: null,
    },
  ],
};

export const UNRESOLVED_PAYLOAD: DifferentialPayload = {
  ...PAYLOAD,
  conflicts: [
    {
      group: ['d1', 'd2'],
      resolved: false,
      joints: null,
      order: null,
      tie: false,
      reason: 'no conditional probability for d:d1 given (empty history)',
    },
  ],
};

export function sessionState(overrides: Partial<SessionState> = {}): SessionState {
  return {
    session_id: 'sess-1',
    patient_id: 'pt-9',
    phase_status: { history: 'submitted', examination: 'pending', investigation: 'pending' },
    findings: { history: { site_of_pain: ['low_back'], pain_at_rest: ['no'] } },
    finalized_record_id: null,
    created_at: 1,
    updated_at: 2,
    ...overrides,
  };
}

type Handler = (init?: RequestInit) => { status: number; body: unknown };

/** Tiny fetch stub keyed by "METHOD path"; records every call it serves. */
export function stubFetch(routes: Record<string, Handler | { status: number; body: unknown }>) {
  const calls: Array<{ method: string; path: string; body: unknown }> = [];
  const impl = async (input: RequestInfo | URL, init?: RequestInit): Promise<Response> => {
    const url = typeof input === 'string' ? input : input.toString();
    const path = url.replace(/^https?:\/\/[^/]+/, '');
    const method = init?.method ?? 'GET';
    calls.push({
      method,
      path,
      body: init?.body ? JSON.parse(init.body as string) : null,
    });
    const route = routes[`${method} ${path}`];
    if (!route) {
      return new Response(
        JSON.stringify({ code: 'not_found', message: `no stub for ${method} ${path}`, detail: null }),
        { status: 404, headers: { 'content-type': 'application/json' } }
      );
    }
    const result = typeof route === 'function' ? route(init) : route;
    return new Response(JSON.stringify(result.body), {
      status: result.status,
      headers: { 'content-type': 'application/json' },
    });
  };
  return { impl, calls };
}
