// Metric-weight dashboard. Sliders hold raw positions; every displayed
// number and bar is the renormalized share, so the panel always shows a
// vector on the simplex no matter where the thumbs sit. Commit PUTs the
// raw positions and re-renders from the service's canonical answer.

import type { Mode, Service, TrainJob } from "./api.js";

const POLL_MS = 250;

export class WeightsPanel {
  readonly root: HTMLElement;
  private readonly service: Service;
  private mode: Mode;
  private names: string[] = [];
  private raw: number[] = [];
  private timestamp = 0;
  private pollTimer: ReturnType<typeof setTimeout> | null = null;
  /** Settles when the in-flight commit or train poll finishes; for tests. */
  lastAction: Promise<void> = Promise.resolve();

  constructor(root: HTMLElement, service: Service, mode: Mode = "existence") {
    this.root = root;
    this.service = service;
    this.mode = mode;
    this.root.classList.add("weights-panel");
    this.root.dataset.testid = "weights-panel";
  }

  get currentMode(): Mode {
    return this.mode;
  }

  shares(): number[] {
    const total = this.raw.reduce((a, b) => a + b, 0);
    if (total <= 0) {
      return this.raw.map(() => 1 / Math.max(this.raw.length, 1));
    }
    return this.raw.map((v) => v / total);
  }

  async load(mode?: Mode): Promise<void> {
    if (mode) this.mode = mode;
    const doc = await this.service.weights(this.mode);
    this.names = Object.keys(doc.weights);
    this.raw = this.names.map((n) => Math.round(doc.weights[n] * 1000));
    this.timestamp = doc.timestamp;
    this.render();
  }

  setRaw(name: string, value: number): void {
    const i = this.names.indexOf(name);
    if (i < 0) return;
    this.raw[i] = value;
    this.refreshShares();
  }

  commit(): Promise<void> {
    const payload: Record<string, number> = {};
    this.names.forEach((n, i) => (payload[n] = this.raw[i]));
    this.lastAction = (async () => {
      try {
        const doc = await this.service.putWeights(this.mode, payload);
        this.names = Object.keys(doc.weights);
        this.raw = this.names.map((n) => Math.round(doc.weights[n] * 1000));
        this.timestamp = doc.timestamp;
        this.render();
        this.note("weights saved");
      } catch (err) {
        this.note(`rejected: ${(err as Error).message}`);
      }
    })();
    return this.lastAction;
  }

  startTraining(): Promise<void> {
    this.lastAction = (async () => {
      let job: TrainJob;
      try {
        job = await this.service.train(this.mode);
      } catch (err) {
        this.note(`training rejected: ${(err as Error).message}`);
        return;
      }
      this.renderJob(job);
      while (job.status === "queued" || job.status === "running") {
        await new Promise((r) => {
          this.pollTimer = setTimeout(r, POLL_MS);
        });
        job = await this.service.job(job.id);
        this.renderJob(job);
      }
      if (job.status === "done") {
        await this.load(); // the engine swapped in the learned vector
        this.renderJob(job);
      }
    })();
    return this.lastAction;
  }

  dispose(): void {
    if (this.pollTimer) clearTimeout(this.pollTimer);
  }

  private note(text: string): void {
    const el = this.root.querySelector<HTMLElement>('[data-testid="weights-note"]');
    if (el) el.textContent = text;
  }

  private refreshShares(): void {
    const shares = this.shares();
    const rows = this.root.querySelectorAll<HTMLElement>('[data-testid="weight-row"]');
    rows.forEach((row, i) => {
      const share = row.querySelector<HTMLElement>('[data-testid="weight-share"]');
      const bar = row.querySelector<HTMLElement>('[data-testid="weight-bar-fill"]');
      if (share) share.textContent = shares[i].toFixed(4);
      if (bar) bar.style.width = `${(shares[i] * 100).toFixed(2)}%`;
    });
  }

  private renderJob(job: TrainJob): void {
    const status = this.root.querySelector<HTMLElement>('[data-testid="train-status"]');
    if (status) {
      status.textContent = job.error ? `${job.status}: ${job.error}` : job.status;
      status.dataset.status = job.status;
    }
    const trace = this.root.querySelector<HTMLElement>('[data-testid="fitness-trace"]');
    if (trace && job.report) {
      const xs = job.report.fitness_trace;
      trace.innerHTML = "";
      const peak = Math.max(...xs, 1e-12);
      for (const x of xs.slice(-60)) {
        const bar = document.createElement("span");
        bar.className = "trace-bar";
        bar.style.height = `${Math.max(2, Math.round((x / peak) * 36))}px`;
        trace.appendChild(bar);
      }
      const label = document.createElement("span");
      label.className = "trace-label";
      label.dataset.testid = "trace-final";
      label.textContent = `fitness ${job.report.best_fitness.toExponential(3)} after ${job.report.iterations_used} rounds`;
      trace.appendChild(label);
    }
  }

  render(): void {
    this.root.innerHTML = "";
    const head = document.createElement("div");
    head.className = "panel-head";

    for (const m of ["existence", "semantic"] as Mode[]) {
      const btn = document.createElement("button");
      btn.dataset.testid = `mode-${m}`;
      btn.className = m === this.mode ? "mode-btn active" : "mode-btn";
      btn.textContent = m;
      btn.addEventListener("click", () => void this.load(m));
      head.appendChild(btn);
    }

    const ts = document.createElement("span");
    ts.dataset.testid = "weights-timestamp";
    ts.className = "weights-ts";
    ts.textContent = this.timestamp > 0
      ? `trained ${new Date(this.timestamp).toISOString()}`
      : "never trained";
    head.appendChild(ts);

    const table = document.createElement("div");
    table.className = "weight-table";
    const shares = this.shares();
    this.names.forEach((name, i) => {
      const row = document.createElement("div");
      row.dataset.testid = "weight-row";
      row.dataset.metric = name;
      row.className = "weight-row";

      const label = document.createElement("span");
      label.className = "weight-name";
      label.textContent = name;

      const slider = document.createElement("input");
      slider.type = "range";
      slider.min = "0";
      slider.max = "1000";
      slider.step = "1";
      slider.value = String(this.raw[i]);
      slider.dataset.testid = "weight-slider";
      slider.addEventListener("input", () => {
        this.raw[i] = Number(slider.value);
        this.refreshShares();
      });

      const share = document.createElement("span");
      share.dataset.testid = "weight-share";
      share.className = "weight-share";
      share.textContent = shares[i].toFixed(4);

      const bar = document.createElement("div");
      bar.className = "weight-bar";
      const fill = document.createElement("div");
      fill.dataset.testid = "weight-bar-fill";
      fill.className = "weight-bar-fill";
      fill.style.width = `${(shares[i] * 100).toFixed(2)}%`;
      bar.appendChild(fill);

      row.append(label, slider, share, bar);
      table.appendChild(row);
    });

    const controls = document.createElement("div");
    controls.className = "panel-controls";
    const commit = document.createElement("button");
    commit.dataset.testid = "commit-btn";
    commit.textContent = "save weights";
    commit.addEventListener("click", () => void this.commit());
    const train = document.createElement("button");
    train.dataset.testid = "train-btn";
    train.textContent = "retrain";
    train.addEventListener("click", () => void this.startTraining());
    const status = document.createElement("span");
    status.dataset.testid = "train-status";
    status.className = "train-status";
    controls.append(commit, train, status);

    const trace = document.createElement("div");
    trace.dataset.testid = "fitness-trace";
    trace.className = "fitness-trace";

    const note = document.createElement("div");
    note.dataset.testid = "weights-note";
    note.className = "panel-note";

    this.root.append(head, table, controls, trace, note);
  }
}
