/**
 * Controller for the operator console.
 *
 * Holds a PlanView and mutates it only through service calls. What-if
 * toggles flip the displayed bit immediately but the displayed score is
 * replaced only when the service answers for exactly those bits; concurrent
 * toggles are serialized and the last state wins. A failed scoring call
 * visually reverts the toggle that caused it.
 */

import { ApiError, ConnectionError } from "./api.js";
import {
  Banner,
  PlanView,
  emptyView,
  sameBits,
  viewFromJob,
} from "./state.js";
import type { Api } from "./types.js";

function bannerFor(err: unknown): Banner {
  if (err instanceof ConnectionError) {
    return { kind: "connection", message: err.message };
  }
  if (err instanceof ApiError && err.status === 404) {
    return { kind: "not-found", message: err.detail };
  }
  if (err instanceof ApiError) {
    // surface the service's own message verbatim
    return { kind: "error", message: err.detail };
  }
  return { kind: "error", message: String(err) };
}

export type Listener = (view: PlanView) => void;

export class ConsoleController {
  private view: PlanView = emptyView();
  private listeners: Listener[] = [];
  private queue: Promise<void> = Promise.resolve();

  constructor(private readonly api: Api) {}

  getView(): PlanView {
    return this.view;
  }

  subscribe(listener: Listener): () => void {
    this.listeners.push(listener);
    return () => {
      this.listeners = this.listeners.filter((l) => l !== listener);
    };
  }

  private setView(view: PlanView): void {
    this.view = view;
    for (const listener of this.listeners) {
      listener(view);
    }
  }

  /** Load an incident and a fresh set of candidate plans for it. */
  async loadIncident(incidentId: string, m?: number): Promise<void> {
    // never show stale data while (re)loading
    this.setView({ ...emptyView(), loading: true });
    try {
      const [actions, incident] = await Promise.all([
        this.api.getActions(),
        this.api.getIncident(incidentId),
      ]);
      const job = await this.api.generatePlans(incidentId, m);
      this.setView(viewFromJob(actions.actions, incident, job));
    } catch (err) {
      this.setView({ ...emptyView(), banner: bannerFor(err) });
    }
  }

  /**
   * Flip one action in the what-if plan. The bit changes immediately; the
   * score follows when the service responds. Returns after this toggle's
   * scoring round-trip settles.
   */
  toggleAction(index: number): Promise<void> {
    const whatIf = this.view.whatIf;
    if (!whatIf) {
      return Promise.reject(new Error("no editable what-if plan"));
    }
    if (index < 0 || index >= whatIf.bits.length) {
      return Promise.reject(new Error(`action index ${index} out of range`));
    }
    const previousBits = [...whatIf.bits];
    const previousScore = whatIf.score;
    const nextBits = [...whatIf.bits];
    nextBits[index] = nextBits[index] === 1 ? 0 : 1;
    this.setView({
      ...this.view,
      whatIf: { bits: nextBits, score: whatIf.score },
    });

    const run = this.queue.then(async () => {
      try {
        const scored = await this.api.scorePlan(nextBits);
        // apply only if no later toggle superseded this state
        if (this.view.whatIf && sameBits(this.view.whatIf.bits, nextBits)) {
          this.setView({
            ...this.view,
            whatIf: { bits: nextBits, score: scored.score },
          });
        }
      } catch {
        if (this.view.whatIf && sameBits(this.view.whatIf.bits, nextBits)) {
          // revert the visual toggle; the previous score still stands
          this.setView({
            ...this.view,
            whatIf: { bits: previousBits, score: previousScore },
          });
        }
      }
    });
    this.queue = run;
    return run;
  }

  /** Reset the scratch plan to all zeros and fetch its score. */
  async resetWhatIf(): Promise<void> {
    const whatIf = this.view.whatIf;
    if (!whatIf) {
      throw new Error("no editable what-if plan");
    }
    const zeros = whatIf.bits.map(() => 0);
    const scored = await this.api.scorePlan(zeros);
    if (this.view.whatIf) {
      this.setView({ ...this.view, whatIf: { bits: zeros, score: scored.score } });
    }
  }

  toggleSelection(source: string): void {
    this.setView({
      ...this.view,
      candidates: this.view.candidates.map((c) =>
        c.source === source ? { ...c, selected: !c.selected } : c,
      ),
    });
  }

  selectedCount(): number {
    return this.view.candidates.filter((c) => c.selected).length;
  }

  /** Fuse the selected candidates server-side and show the result. */
  async requestFusion(): Promise<void> {
    const selected = this.view.candidates.filter((c) => c.selected);
    if (selected.length === 0) {
      throw new Error("select at least one candidate to fuse");
    }
    try {
      const fused = await this.api.fusePlans(selected.map((c) => [...c.bits]));
      const score =
        fused.score ?? (await this.api.scorePlan(fused.bits)).score;
      this.setView({
        ...this.view,
        banner: null,
        fused: { bits: fused.bits, score, source: fused.source },
      });
    } catch (err) {
      this.setView({ ...this.view, banner: bannerFor(err) });
    }
  }
}
