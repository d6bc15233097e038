// Shell: base-URL config, tab switching, and the wiring between the
// three views. All state that matters lives on the server; the shell
// keeps only the base URL (localStorage) and which tab is open.

import type { Mode, Recommendation } from "./api.js";
import { ServiceClient } from "./api.js";
import { CardStack } from "./cards.js";
import { SummaryView } from "./summary.js";
import { WeightsPanel } from "./weights.js";

const BASE_KEY = "kglf:base";
const DEFAULT_BASE = "http://127.0.0.1:8776";

export interface App {
  root: HTMLElement;
  client: ServiceClient;
  stack: CardStack;
  weights: WeightsPanel;
  summary: SummaryView;
  showTab(name: "review" | "weights" | "graph"): void;
}

export function storedBase(): string {
  try {
    return localStorage.getItem(BASE_KEY) || DEFAULT_BASE;
  } catch {
    return DEFAULT_BASE;
  }
}

export async function createApp(root: HTMLElement, baseUrl?: string): Promise<App> {
  const base = baseUrl ?? storedBase();
  const client = new ServiceClient(base);
  root.innerHTML = "";
  root.classList.add("kglf-app");

  const header = document.createElement("header");
  const title = document.createElement("h1");
  title.textContent = "kglf review";
  const baseInput = document.createElement("input");
  baseInput.dataset.testid = "base-url";
  baseInput.value = base;
  baseInput.addEventListener("change", () => {
    try {
      localStorage.setItem(BASE_KEY, baseInput.value);
    } catch {
      // storage may be unavailable; the URL still applies after reload
    }
    location.reload();
  });
  header.append(title, baseInput);

  const tabs = document.createElement("nav");
  const panes: Record<string, HTMLElement> = {};
  for (const name of ["review", "weights", "graph"]) {
    const btn = document.createElement("button");
    btn.dataset.testid = `tab-${name}`;
    btn.textContent = name;
    btn.addEventListener("click", () => showTab(name as "review" | "weights" | "graph"));
    tabs.appendChild(btn);
    const pane = document.createElement("section");
    pane.dataset.testid = `pane-${name}`;
    pane.hidden = name !== "review";
    panes[name] = pane;
  }

  // review pane: mode selector, debug badge toggle, the stack
  const reviewBar = document.createElement("div");
  reviewBar.className = "review-bar";
  const modeSelect = document.createElement("select");
  modeSelect.dataset.testid = "mode-select";
  for (const m of ["existence", "semantic"]) {
    const opt = document.createElement("option");
    opt.value = m;
    opt.textContent = m;
    modeSelect.appendChild(opt);
  }
  const badgeToggle = document.createElement("label");
  badgeToggle.className = "debug-toggle";
  const badgeBox = document.createElement("input");
  badgeBox.type = "checkbox";
  badgeBox.dataset.testid = "badge-toggle";
  badgeToggle.append(badgeBox, document.createTextNode(" show sources (debug)"));
  reviewBar.append(modeSelect, badgeToggle);

  const stackRoot = document.createElement("div");
  const stack = new CardStack(stackRoot, client, { mode: "existence", k: 9 });
  panes.review.append(reviewBar, stackRoot);

  modeSelect.addEventListener("change", () => {
    void stack.setMode(modeSelect.value as Mode);
  });
  badgeBox.addEventListener("change", () => stack.setShowSources(badgeBox.checked));

  const weightsRoot = document.createElement("div");
  const weights = new WeightsPanel(weightsRoot, client);
  panes.weights.appendChild(weightsRoot);

  const summaryRoot = document.createElement("div");
  const summary = new SummaryView(summaryRoot, client);
  panes.graph.appendChild(summaryRoot);

  stackRoot.addEventListener("kglf:decided", (ev) => {
    const { card, accepted } = (ev as CustomEvent<{
      card: Recommendation;
      accepted: boolean;
    }>).detail;
    const verb = accepted ? "accepted" : "rejected";
    summary.addFeedEntry(
      `${verb} ${card.subject_label} ↔ ${card.object_label}` +
        (card.relation ? ` (${card.relation})` : "")
    );
  });

  function showTab(name: "review" | "weights" | "graph"): void {
    for (const [pane, el] of Object.entries(panes)) el.hidden = pane !== name;
    if (name === "weights") void weights.load();
    if (name === "graph") void summary.load();
  }

  root.append(header, tabs, panes.review, panes.weights, panes.graph);

  const targets = await client.nodeIds();
  await stack.start(targets);

  return { root, client, stack, weights, summary, showTab };
}
