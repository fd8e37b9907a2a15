// Wire types mirroring the service's JSON API.

export type Sex = "male" | "female";
export type TriState = "present" | "absent" | "unknown";

export interface KbSymptom {
  id: string;
  label: string;
}

export interface KbExport {
  name: string;
  version: string;
  symptoms: { id: string; label: string }[];
  diseases: { id: string; label: string }[];
}

export interface FindingEntry {
  symptom_id: string;
  value: TriState;
}

export interface InferRequest {
  patient: { age: number; sex: Sex; cycle_day?: number | null };
  onset_time: number;
  findings: FindingEntry[];
  second?: { time: number; findings: FindingEntry[] } | null;
  priors_override?: Record<string, number> | null;
}

export interface DecisionBlock {
  expected_morbidity: Record<string, number>;
  recommendation: string;
  margin: number;
  switch_threshold: number | null;
  threshold_disease: string | null;
}

export interface InferResponse {
  posteriors: Record<string, number>;
  decomposition: Record<string, Record<string, number>>;
  measurement_time: number;
  first_time?: number;
  decision: DecisionBlock;
  priors: Record<string, number>;
}

export interface SessionState {
  patient: { age: number; sex: Sex; cycleDay: number | null };
  onsetTime: number;
  findings: Record<string, TriState>;
  second: { enabled: boolean; time: number; findings: Record<string, TriState> };
  lastResponse: InferResponse | null;
  pending: boolean;
  error: string | null;
}

export interface ApiClient {
  getKb(): Promise<KbExport>;
  infer(request: InferRequest): Promise<InferResponse>;
}
