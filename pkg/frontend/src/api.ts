// Typed client for the review service. Every UI action goes through
// exactly one of these calls; nothing else talks to the network.

export type Mode = "existence" | "semantic";

export interface RelationOption {
  subject: string;
  object: string;
  relation: string;
}

export interface Recommendation {
  subject: string;
  object: string;
  relation: string | null;
  score: number;
  source: "genetic" | "baseline";
  rank: number;
  subject_label: string;
  object_label: string;
  compatible_relations?: RelationOption[];
}

export interface RecommendationPage {
  node: string;
  mode: Mode;
  items: Recommendation[];
}

export interface FeedbackBody {
  subject: string;
  object: string;
  accepted: boolean;
  mode: Mode;
  relation?: string | null;
  link_relation?: string | null;
  timestamp?: number;
}

export interface WeightsDoc {
  mode: Mode;
  weights: Record<string, number>;
  timestamp: number;
}

export interface TrainReport {
  best_fitness: number;
  iterations_used: number;
  fitness_trace: number[];
  best_weights: number[];
}

export interface TrainJob {
  id: string;
  mode: Mode;
  standard: string | null;
  status: "queued" | "running" | "done" | "failed";
  error: string | null;
  report?: TrainReport;
}

export interface GraphSummary {
  nodes: number;
  links: number;
  non_links: number;
  relations: Record<string, number>;
  feedback: { total: number; accepted: number; rejected: number };
}

export interface NodePayload {
  id: string;
  label: string;
  concept: string;
  degree: number;
  attributes: Record<string, string>;
}

export class ApiError extends Error {
  constructor(public status: number, detail: string) {
    super(detail);
    this.name = "ApiError";
  }
}

/** The surface the components are written against; tests substitute fakes. */
export interface Service {
  recommendations(
    nodeId: string,
    mode: Mode,
    k: number,
    interleave: boolean
  ): Promise<RecommendationPage>;
  feedback(body: FeedbackBody): Promise<unknown>;
  weights(mode: Mode): Promise<WeightsDoc>;
  putWeights(mode: Mode, weights: Record<string, number>): Promise<WeightsDoc>;
  train(mode: Mode, standard?: string | null): Promise<TrainJob>;
  job(id: string): Promise<TrainJob>;
  summary(): Promise<GraphSummary>;
  nodeIds(concept?: string): Promise<string[]>;
  node(id: string): Promise<NodePayload>;
  exportUrl(anonymize: boolean): string;
}

export class ServiceClient implements Service {
  constructor(public baseUrl: string) {
    this.baseUrl = baseUrl.replace(/\/+$/, "");
  }

  private async request<T>(method: string, path: string, body?: unknown): Promise<T> {
    const init: RequestInit = { method, headers: {} };
    if (body !== undefined) {
      (init.headers as Record<string, string>)["content-type"] = "application/json";
      init.body = JSON.stringify(body);
    }
    const resp = await fetch(this.baseUrl + path, init);
    const text = await resp.text();
    let data: unknown = null;
    if (text) {
      try {
        data = JSON.parse(text);
      } catch {
        data = text;
      }
    }
    if (!resp.ok) {
      const detail =
        data && typeof data === "object" && "detail" in (data as object)
          ? String((data as { detail: unknown }).detail)
          : resp.statusText;
      throw new ApiError(resp.status, detail);
    }
    return data as T;
  }

  recommendations(nodeId: string, mode: Mode, k: number, interleave: boolean) {
    const q = new URLSearchParams({
      mode,
      k: String(k),
      interleave: String(interleave),
    });
    return this.request<RecommendationPage>(
      "GET",
      `/nodes/${encodeURIComponent(nodeId)}/recommendations?${q}`
    );
  }

  feedback(body: FeedbackBody) {
    return this.request<unknown>("POST", "/feedback", body);
  }

  weights(mode: Mode) {
    return this.request<WeightsDoc>("GET", `/weights?mode=${mode}`);
  }

  putWeights(mode: Mode, weights: Record<string, number>) {
    return this.request<WeightsDoc>("PUT", `/weights?mode=${mode}`, weights);
  }

  train(mode: Mode, standard?: string | null) {
    const body: Record<string, unknown> = { mode };
    if (standard) body.standard = standard;
    return this.request<TrainJob>("POST", "/train", body);
  }

  job(id: string) {
    return this.request<TrainJob>("GET", `/train/${encodeURIComponent(id)}`);
  }

  summary() {
    return this.request<GraphSummary>("GET", "/graph/summary");
  }

  async nodeIds(concept?: string) {
    const path = concept ? `/nodes?concept=${encodeURIComponent(concept)}` : "/nodes";
    const doc = await this.request<{ ids: string[] }>("GET", path);
    return doc.ids;
  }

  node(id: string) {
    return this.request<NodePayload>("GET", `/nodes/${encodeURIComponent(id)}`);
  }

  exportUrl(anonymize: boolean) {
    return `${this.baseUrl}/export?anonymize=${anonymize}`;
  }
}
