/**
 * Wire types mirroring the service API, plus the Api interface the console
 * programs against. The console never computes scores, weights, or fusion
 * itself; every number it displays came out of one of these calls.
 */

export interface ActionInfo {
  index: number;
  name: string;
  impact: number;
  resource_engagement: number;
  weight: number;
}

export interface ActionsResponse {
  actions: ActionInfo[];
  weight_source: string;
}

export interface PerActionScore {
  index: number;
  name: string;
  weight: number;
  included: boolean;
}

export interface ScoreResponse {
  score: number;
  per_action: PerActionScore[];
}

export interface FuseResponse {
  bits: number[];
  source: string;
  /** Null when the fused vector is not catalog-length; rescore explicitly. */
  score: number | null;
}

export interface GenerationOut {
  source: string;
  bits: number[];
  score: number;
  reprompts: number;
  raw_text: string;
}

export interface JobResult {
  generations: GenerationOut[];
  fused_bits: number[];
  fused_source: string;
  score: number;
}

export interface JobResponse {
  job_id: string;
  incident_id: string;
  backend_id: string;
  m: number;
  retry_budget: number;
  status: string;
  error: string | null;
  result: JobResult | null;
}

export interface IncidentSummary {
  id: string;
  description: string | null;
  city: string | null;
  state: string | null;
  report: string;
}

export interface Api {
  getActions(): Promise<ActionsResponse>;
  getIncident(incidentId: string): Promise<IncidentSummary>;
  generatePlans(incidentId: string, m?: number): Promise<JobResponse>;
  getJob(jobId: string): Promise<JobResponse>;
  scorePlan(bits: number[]): Promise<ScoreResponse>;
  fusePlans(plans: number[][]): Promise<FuseResponse>;
}
