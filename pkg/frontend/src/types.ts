export type PhaseName = 'history' | 'examination' | 'investigation';

export const PHASES: PhaseName[] = ['history', 'examination', 'investigation'];

export interface CatalogAttribute {
  id: string;
  phase: PhaseName;
  multi_valued: boolean;
  allowed_values: string[];
}

export interface Catalog {
  attributes: CatalogAttribute[];
}

export type Findings = Record<string, string[]>;

export interface SessionSummary {
  session_id: string;
  patient_id: string;
  phase_status: Record<PhaseName, 'pending' | 'submitted'>;
  created_at: number;
}

export interface SessionState extends SessionSummary {
  findings: Partial<Record<PhaseName, Findings>>;
  finalized_record_id: string | null;
  updated_at: number;
}

export interface DifferentialEntry {
  disease: string;
  display_name: string;
  chance: number;
  match_class_per_phase: Partial<Record<PhaseName, 'full' | 'partial' | 'zero'>>;
}

export interface ConflictAudit {
  group: string[];
  resolved: boolean;
  joints: Record<string, number> | null;
  order: string[] | null;
  tie: boolean;
  reason: string | null;
}

export interface DifferentialPayload {
  patient_id: string;
  phases_performed: PhaseName[];
  divisor_used: number;
  epsilon: number;
  differential: DifferentialEntry[];
  conflicts: ConflictAudit[];
}

export interface CaseRecord {
  record_id: string;
  session_id: string;
  patient_id: string;
  finalized_at: number;
  findings: Partial<Record<PhaseName, Findings>>;
  differential: DifferentialPayload;
}
