import { describe, expect, it } from "vitest";

import { ApiError, ConnectionError } from "../src/api.js";
import { ConsoleController } from "../src/console.js";
import type {
  ActionsResponse,
  Api,
  FuseResponse,
  IncidentSummary,
  JobResponse,
  ScoreResponse,
} from "../src/types.js";

const N = 10;

function actionsFixture(): ActionsResponse {
  return {
    weight_source: "topsis_engine",
    actions: Array.from({ length: N }, (_, i) => ({
      index: i,
      name: `Action ${i}`,
      impact: i + 1,
      resource_engagement: i + 1,
      weight: (i + 1) / 10,
    })),
  };
}

function jobFixture(scoreOf: (bits: number[]) => number): JobResponse {
  const vectors: Array<[string, number[], number, string]> = [
    ["mock#1", [1, 0, 1, 1, 0, 1, 0, 1, 0, 1], 0, "reasoning one"],
    ["mock#2", [1, 1, 0, 1, 1, 0, 1, 0, 1, 0], 0, "reasoning two"],
    ["mock#3", [0, 1, 1, 0, 0, 1, 1, 1, 0, 1], 1, "reasoning three"],
  ];
  const fusedBits = [1, 1, 1, 1, 0, 1, 1, 1, 0, 1];
  return {
    job_id: "job-1",
    incident_id: "A-2760450",
    backend_id: "mock",
    m: 3,
    retry_budget: 3,
    status: "Done",
    error: null,
    result: {
      generations: vectors.map(([source, bits, reprompts, raw_text]) => ({
        source,
        bits,
        score: scoreOf(bits),
        reprompts,
        raw_text,
      })),
      fused_bits: fusedBits,
      fused_source: "fused(3)",
      score: scoreOf(fusedBits),
    },
  };
}

/**
 * Fake service. Scores are an arbitrary deterministic function of the bits
 * (NOT a weighted sum), so any client that displayed the right number can
 * only have obtained it from the service.
 */
class FakeApi implements Api {
  scoreCalls: number[][] = [];
  fuseCalls: number[][][] = [];
  failScoring = false;
  holdScoring = false;
  private pending: Array<() => void> = [];

  scoreOf(bits: number[]): number {
    return Number(`0.${bits.join("")}1`);
  }

  release(): void {
    const next = this.pending.shift();
    if (next) next();
  }

  pendingCount(): number {
    return this.pending.length;
  }

  async getActions(): Promise<ActionsResponse> {
    return actionsFixture();
  }

  async getIncident(incidentId: string): Promise<IncidentSummary> {
    if (incidentId !== "A-2760450") {
      throw new ApiError(404, `unknown incident id '${incidentId}'`);
    }
    return {
      id: incidentId,
      description: "Entry ramp closed due to stalled truck.",
      city: "Liverpool",
      state: "NY",
      report: "Accident ID: A-2760450, ...",
    };
  }

  async generatePlans(): Promise<JobResponse> {
    return jobFixture((bits) => this.scoreOf(bits));
  }

  async getJob(): Promise<JobResponse> {
    return jobFixture((bits) => this.scoreOf(bits));
  }

  async scorePlan(bits: number[]): Promise<ScoreResponse> {
    this.scoreCalls.push([...bits]);
    if (this.holdScoring) {
      await new Promise<void>((resolve) => this.pending.push(resolve));
    }
    if (this.failScoring) {
      throw new ApiError(500, "scoring unavailable");
    }
    return { score: this.scoreOf(bits), per_action: [] };
  }

  async fusePlans(plans: number[][]): Promise<FuseResponse> {
    this.fuseCalls.push(plans.map((p) => [...p]));
    const bits = plans[0].map((_, j) => {
      const ones = plans.reduce((acc, plan) => acc + plan[j], 0);
      return 2 * ones >= plans.length ? 1 : 0;
    });
    return { bits, source: `fused(${plans.length})`, score: this.scoreOf(bits) };
  }
}

async function loadedController(api: FakeApi = new FakeApi()) {
  const controller = new ConsoleController(api);
  await controller.loadIncident("A-2760450");
  return { controller, api };
}

function tick(): Promise<void> {
  return new Promise((resolve) => setTimeout(resolve, 0));
}

describe("loadIncident", () => {
  it("populates the view from a generated job", async () => {
    const { controller } = await loadedController();
    const view = controller.getView();
    expect(view.banner).toBeNull();
    expect(view.incident?.description).toContain("stalled truck");
    expect(view.actions).toHaveLength(N);
    expect(view.candidates).toHaveLength(3);
    expect(view.candidates[0].reasoning).toBe("reasoning one");
    expect(view.fused?.bits).toEqual([1, 1, 1, 1, 0, 1, 1, 1, 0, 1]);
    // the what-if scratch plan starts as the fused plan with its server score
    expect(view.whatIf?.bits).toEqual(view.fused?.bits);
    expect(view.whatIf?.score).toBe(view.fused?.score);
  });

  it("shows a not-found banner for unknown incidents", async () => {
    const controller = new ConsoleController(new FakeApi());
    await controller.loadIncident("A-0000000");
    const view = controller.getView();
    expect(view.banner?.kind).toBe("not-found");
    expect(view.incident).toBeNull();
    expect(view.candidates).toHaveLength(0);
  });

  it("shows a connection banner and no stale data when the service is down", async () => {
    const api = new FakeApi();
    const controller = new ConsoleController(api);
    await controller.loadIncident("A-2760450");
    expect(controller.getView().incident).not.toBeNull();

    api.getActions = async () => {
      throw new ConnectionError("cannot reach service");
    };
    await controller.loadIncident("A-2760450");
    const view = controller.getView();
    expect(view.banner?.kind).toBe("connection");
    expect(view.incident).toBeNull();
    expect(view.candidates).toHaveLength(0);
  });
});

describe("what-if toggling", () => {
  it("flips the bit immediately but replaces the score only on response", async () => {
    const { controller, api } = await loadedController();
    api.holdScoring = true;
    const before = controller.getView().whatIf!;
    const pending = controller.toggleAction(0);
    await tick();
    const during = controller.getView().whatIf!;
    expect(during.bits[0]).toBe(before.bits[0] === 1 ? 0 : 1);
    expect(during.score).toBe(before.score); // unchanged until the response
    api.release();
    await pending;
    const after = controller.getView().whatIf!;
    expect(after.score).toBe(api.scoreOf(after.bits));
  });

  it("displays exactly the service-reported score, not client arithmetic", async () => {
    const { controller, api } = await loadedController();
    await controller.toggleAction(4);
    const whatIf = controller.getView().whatIf!;
    expect(whatIf.score).toBe(api.scoreOf(whatIf.bits));
  });

  it("reverts the toggle visually when scoring fails", async () => {
    const { controller, api } = await loadedController();
    const before = controller.getView().whatIf!;
    api.failScoring = true;
    await controller.toggleAction(2);
    const after = controller.getView().whatIf!;
    expect(after.bits).toEqual(before.bits);
    expect(after.score).toBe(before.score);
  });

  it("is an involution: toggling twice restores bits and score", async () => {
    const { controller } = await loadedController();
    const before = controller.getView().whatIf!;
    await controller.toggleAction(3);
    await controller.toggleAction(3);
    const after = controller.getView().whatIf!;
    expect(after.bits).toEqual(before.bits);
    expect(after.score).toBe(before.score);
  });

  it("serializes concurrent toggles; the last state wins", async () => {
    const { controller, api } = await loadedController();
    api.holdScoring = true;
    const first = controller.toggleAction(0);
    const second = controller.toggleAction(1);
    await tick();
    // only the first request is in flight; the second waits its turn
    expect(api.scoreCalls).toHaveLength(1);
    api.release();
    await first;
    expect(api.scoreCalls).toHaveLength(2);
    api.release();
    await second;
    const whatIf = controller.getView().whatIf!;
    // both flips applied, score matches the final bits
    expect(api.scoreCalls[1]).toEqual(whatIf.bits);
    expect(whatIf.score).toBe(api.scoreOf(whatIf.bits));
  });

  it("rejects toggling before an incident is loaded", async () => {
    const controller = new ConsoleController(new FakeApi());
    await expect(controller.toggleAction(0)).rejects.toThrow("what-if");
  });

  it("reset produces the all-zeros plan with its service score", async () => {
    const { controller, api } = await loadedController();
    await controller.resetWhatIf();
    const whatIf = controller.getView().whatIf!;
    expect(whatIf.bits).toEqual(Array(N).fill(0));
    expect(whatIf.score).toBe(api.scoreOf(whatIf.bits));
  });
});

describe("fusion", () => {
  it("fuses the selected candidates via the service", async () => {
    const { controller, api } = await loadedController();
    await controller.requestFusion();
    expect(api.fuseCalls).toHaveLength(1);
    expect(api.fuseCalls[0]).toHaveLength(3);
    const fused = controller.getView().fused!;
    expect(fused.source).toBe("fused(3)");
    expect(fused.score).toBe(api.scoreOf(fused.bits));
  });

  it("fusing a single selected candidate yields that candidate", async () => {
    const { controller } = await loadedController();
    controller.toggleSelection("mock#2");
    controller.toggleSelection("mock#3");
    expect(controller.selectedCount()).toBe(1);
    await controller.requestFusion();
    const view = controller.getView();
    expect(view.fused?.bits).toEqual(view.candidates[0].bits);
  });

  it("rejects an empty selection", async () => {
    const { controller } = await loadedController();
    for (const c of controller.getView().candidates) {
      controller.toggleSelection(c.source);
    }
    expect(controller.selectedCount()).toBe(0);
    await expect(controller.requestFusion()).rejects.toThrow("select");
  });

  it("surfaces service fusion errors verbatim", async () => {
    const { controller, api } = await loadedController();
    api.fusePlans = async () => {
      throw new ApiError(400, "found lengths [2, 3], expected 2");
    };
    await controller.requestFusion();
    expect(controller.getView().banner?.message).toBe(
      "found lengths [2, 3], expected 2",
    );
  });
});
