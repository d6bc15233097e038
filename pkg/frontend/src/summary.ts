// Graph overview: authoritative counts from the service, a per-concept
// node browser, export downloads, and a session-local echo of the
// verdicts posted from this page. The echo is display only; the totals
// row always comes back from /graph/summary.

import type { Service } from "./api.js";
import { ApiError } from "./api.js";

export class SummaryView {
  readonly root: HTMLElement;
  private readonly service: Service;
  private feed: string[] = [];

  constructor(root: HTMLElement, service: Service) {
    this.root = root;
    this.service = service;
    this.root.classList.add("summary-view");
    this.root.dataset.testid = "summary-view";
  }

  async load(): Promise<void> {
    const summary = await this.service.summary();
    this.root.innerHTML = "";

    const tiles = document.createElement("div");
    tiles.className = "tile-grid";
    const counts: Array<[string, number]> = [
      ["nodes", summary.nodes],
      ["links", summary.links],
      ["non-links", summary.non_links],
      ["verdicts", summary.feedback.total],
    ];
    for (const [label, value] of counts) {
      const tile = document.createElement("div");
      tile.className = "tile";
      tile.dataset.testid = `tile-${label}`;
      const v = document.createElement("div");
      v.className = "tile-value";
      v.textContent = String(value);
      const l = document.createElement("div");
      l.className = "tile-label";
      l.textContent = label;
      tile.append(v, l);
      tiles.appendChild(tile);
    }

    const relations = document.createElement("div");
    relations.className = "relation-counts";
    relations.dataset.testid = "relation-counts";
    for (const [rel, n] of Object.entries(summary.relations)) {
      const row = document.createElement("div");
      row.textContent = `${rel}: ${n}`;
      relations.appendChild(row);
    }

    const fb = document.createElement("div");
    fb.dataset.testid = "feedback-totals";
    fb.className = "feedback-totals";
    fb.textContent =
      `accepted ${summary.feedback.accepted} / rejected ${summary.feedback.rejected}`;

    const filter = document.createElement("div");
    filter.className = "concept-filter";
    const input = document.createElement("input");
    input.dataset.testid = "concept-input";
    input.placeholder = "concept, e.g. Person";
    const go = document.createElement("button");
    go.dataset.testid = "concept-go";
    go.textContent = "list nodes";
    const list = document.createElement("ul");
    list.dataset.testid = "node-list";
    list.className = "node-list";
    go.addEventListener("click", async () => {
      list.innerHTML = "";
      try {
        const ids = await this.service.nodeIds(input.value || undefined);
        for (const id of ids) {
          const li = document.createElement("li");
          li.textContent = id;
          list.appendChild(li);
        }
      } catch (err) {
        const li = document.createElement("li");
        li.className = "error";
        li.textContent =
          err instanceof ApiError ? `unknown concept (${err.status})` : String(err);
        list.appendChild(li);
      }
    });
    filter.append(input, go, list);

    const exports = document.createElement("div");
    exports.className = "export-row";
    const plain = document.createElement("a");
    plain.dataset.testid = "export-link";
    plain.href = this.service.exportUrl(false);
    plain.textContent = "download bundle";
    const anon = document.createElement("a");
    anon.dataset.testid = "export-anon-link";
    anon.href = this.service.exportUrl(true);
    anon.textContent = "download anonymized";
    exports.append(plain, anon);

    const feed = document.createElement("ul");
    feed.dataset.testid = "feedback-feed";
    feed.className = "feedback-feed";
    for (const line of this.feed.slice(-12).reverse()) {
      const li = document.createElement("li");
      li.textContent = line;
      feed.appendChild(li);
    }

    const refresh = document.createElement("button");
    refresh.dataset.testid = "refresh-btn";
    refresh.textContent = "refresh";
    refresh.addEventListener("click", () => void this.load());

    this.root.append(tiles, relations, fb, filter, exports, feed, refresh);
  }

  /** Session-local; wired to the card stack's decided events by the shell. */
  addFeedEntry(line: string): void {
    this.feed.push(line);
    const feed = this.root.querySelector<HTMLElement>('[data-testid="feedback-feed"]');
    if (feed) {
      const li = document.createElement("li");
      li.textContent = line;
      feed.prepend(li);
      while (feed.children.length > 12) feed.removeChild(feed.lastChild as Node);
    }
  }
}
