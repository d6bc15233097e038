import { beforeEach, describe, expect, it } from "vitest";

import type { TrainJob } from "../src/api.js";
import { WeightsPanel } from "../src/weights.js";
import { FakeService, flush } from "./fakes.js";

function mount(): HTMLElement {
  document.body.innerHTML = "";
  const root = document.createElement("div");
  document.body.appendChild(root);
  return root;
}

function q<T extends HTMLElement = HTMLElement>(root: HTMLElement, id: string): T {
  const el = root.querySelector<T>(`[data-testid="${id}"]`);
  if (!el) throw new Error(`no element with testid ${id}`);
  return el;
}

function rows(root: HTMLElement): HTMLElement[] {
  return [...root.querySelectorAll<HTMLElement>('[data-testid="weight-row"]')];
}

function shareValues(root: HTMLElement): number[] {
  return rows(root).map((row) =>
    Number(row.querySelector('[data-testid="weight-share"]')?.textContent)
  );
}

function drag(row: HTMLElement, value: number): void {
  const slider = row.querySelector<HTMLInputElement>('[data-testid="weight-slider"]');
  if (!slider) throw new Error("row has no slider");
  slider.value = String(value);
  slider.dispatchEvent(new Event("input"));
}

function job(over: Partial<TrainJob>): TrainJob {
  return { id: "j1", mode: "existence", standard: null, status: "queued", error: null, ...over };
}

describe("WeightsPanel", () => {
  let root: HTMLElement;
  let svc: FakeService;
  let panel: WeightsPanel;

  beforeEach(() => {
    root = mount();
    svc = new FakeService();
    panel = new WeightsPanel(root, svc);
  });

  it("renders one row per metric with shares on the simplex", async () => {
    await panel.load();

    const names = rows(root).map((r) => r.dataset.metric);
    expect(names).toEqual(["jaccard", "sorensen", "arr"]);
    expect(shareValues(root)).toEqual([0.5, 0.25, 0.25]);
    expect(q(root, "weights-timestamp").textContent).toBe("never trained");
  });

  it("renormalizes the displayed shares while a slider moves", async () => {
    await panel.load();

    drag(rows(root)[0], 250); // raw becomes 250/250/250

    const shares = shareValues(root);
    for (const s of shares) expect(s).toBeCloseTo(1 / 3, 4);
    expect(shares.reduce((a, b) => a + b, 0)).toBeCloseTo(1, 3);
    const fill = rows(root)[0].querySelector<HTMLElement>('[data-testid="weight-bar-fill"]');
    expect(fill?.style.width).toBe("33.33%");
  });

  it("falls back to uniform display when every thumb hits zero", async () => {
    await panel.load();

    for (const row of rows(root)) drag(row, 0);

    for (const s of shareValues(root)) expect(s).toBeCloseTo(1 / 3, 4);
  });

  it("commits raw positions and re-renders the canonical response", async () => {
    await panel.load();

    drag(rows(root)[0], 0); // raw now 0/250/250
    await panel.commit();

    expect(svc.putCalls).toEqual([
      { mode: "existence", weights: { jaccard: 0, sorensen: 250, arr: 250 } },
    ]);
    expect(shareValues(root)).toEqual([0, 0.5, 0.5]);
    const sliders = rows(root).map(
      (r) => r.querySelector<HTMLInputElement>('[data-testid="weight-slider"]')?.value
    );
    expect(sliders).toEqual(["0", "500", "500"]);
    expect(q(root, "weights-note").textContent).toBe("weights saved");
  });

  it("surfaces a rejected commit without touching the rows", async () => {
    await panel.load();

    for (const row of rows(root)) drag(row, 0);
    await panel.commit();

    expect(q(root, "weights-note").textContent).toBe("rejected: weights sum to zero");
    expect(rows(root)).toHaveLength(3);
    // raw state is preserved so the user can keep adjusting
    expect(panel.shares().reduce((a, b) => a + b, 0)).toBeCloseTo(1, 6);
  });

  it("polls a training job to done and reloads the learned vector", async () => {
    await panel.load();
    svc.jobs = [
      job({ status: "queued" }),
      job({ status: "running" }),
      job({
        status: "done",
        report: {
          best_fitness: 0.0123,
          iterations_used: 41,
          fitness_trace: [0.3, 0.1, 0.0123],
          best_weights: [0.7, 0.2, 0.1],
        },
      }),
    ];
    // the engine swaps the stored vector in once the job lands
    svc.weightsByMode.existence = { jaccard: 0.7, sorensen: 0.2, arr: 0.1 };
    svc.timestampByMode.existence = 1_700_000_000_000;

    await panel.startTraining();

    expect(q(root, "train-status").dataset.status).toBe("done");
    expect(q(root, "trace-final").textContent).toContain("after 41 rounds");
    expect(shareValues(root)).toEqual([0.7, 0.2, 0.1]);
    expect(q(root, "weights-timestamp").textContent).toContain("trained 2023-11-14");
  });

  it("reports a failed job and keeps the old vector", async () => {
    await panel.load();
    svc.jobs = [job({ status: "queued" }), job({ status: "failed", error: "no gold pairs" })];

    await panel.startTraining();

    const status = q(root, "train-status");
    expect(status.dataset.status).toBe("failed");
    expect(status.textContent).toBe("failed: no gold pairs");
    expect(shareValues(root)).toEqual([0.5, 0.25, 0.25]);
  });

  it("notes an upfront training rejection", async () => {
    await panel.load();
    svc.jobs = [];

    await panel.startTraining();

    expect(q(root, "weights-note").textContent).toBe("training rejected: not enough data");
  });

  it("switches vectors when a mode button is clicked", async () => {
    await panel.load();

    q(root, "mode-semantic").click();
    await flush();

    expect(panel.currentMode).toBe("semantic");
    expect(rows(root).map((r) => r.dataset.metric)).toEqual(["jaccard"]);
    expect(shareValues(root)).toEqual([1]);
  });
});
