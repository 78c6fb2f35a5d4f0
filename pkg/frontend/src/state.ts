/** Immutable view state for the operator console. */

import type { ActionInfo, IncidentSummary, JobResponse } from "./types.js";

export interface Candidate {
  source: string;
  bits: number[];
  score: number;
  reasoning: string;
  selected: boolean;
}

export interface FusedView {
  bits: number[];
  score: number;
  source: string;
}

/**
 * Scratch plan for what-if editing. Edits never touch the stored job; the
 * score always comes from the service for exactly these bits.
 */
export interface WhatIf {
  bits: number[];
  score: number;
}

export type BannerKind = "not-found" | "connection" | "error";

export interface Banner {
  kind: BannerKind;
  message: string;
}

export interface PlanView {
  loading: boolean;
  banner: Banner | null;
  actions: ActionInfo[];
  incident: IncidentSummary | null;
  jobId: string | null;
  candidates: Candidate[];
  fused: FusedView | null;
  whatIf: WhatIf | null;
}

export function emptyView(): PlanView {
  return {
    loading: false,
    banner: null,
    actions: [],
    incident: null,
    jobId: null,
    candidates: [],
    fused: null,
    whatIf: null,
  };
}

export function viewFromJob(
  actions: ActionInfo[],
  incident: IncidentSummary,
  job: JobResponse,
): PlanView {
  if (!job.result) {
    return {
      ...emptyView(),
      actions,
      incident,
      jobId: job.job_id,
      banner: { kind: "error", message: job.error ?? `job ${job.status}` },
    };
  }
  const fused: FusedView = {
    bits: [...job.result.fused_bits],
    score: job.result.score,
    source: job.result.fused_source,
  };
  return {
    loading: false,
    banner: null,
    actions,
    incident,
    jobId: job.job_id,
    candidates: job.result.generations.map((g) => ({
      source: g.source,
      bits: [...g.bits],
      score: g.score,
      reasoning: g.raw_text,
      selected: true,
    })),
    fused,
    // the scratch plan starts as a copy of the fused plan; its score is the
    // service's score for those same bits
    whatIf: { bits: [...fused.bits], score: fused.score },
  };
}

export function sameBits(a: number[] | undefined, b: number[]): boolean {
  return !!a && a.length === b.length && a.every((bit, i) => bit === b[i]);
}
