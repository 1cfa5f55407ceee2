/** Typed client for the conversation-analysis HTTP API. */

export interface NodeDoc {
  id: string;
  seq_index: number;
  question: string;
  answer: string;
  summary: string;
  token_count: number;
  memberships: [string, number][];
  primary_topic: string | null;
}

export interface ConversationDoc {
  id: string;
  title: string;
  nodes: NodeDoc[];
  analysis_version: number;
}

export interface TopicDoc {
  id: string;
  label: string;
  ordinal: number;
  level: number;
  parent: string | null;
  member_similarities: Record<string, number>;
}

export interface TopicsPayload {
  analysis_version: number;
  topics: TopicDoc[];
}

export interface GlobalGeometry {
  analysis_version: number;
  nodes: { id: string; x: number; row: number }[];
  edges: [number, number][];
  topics: { id: string; row: number; ordinal: number }[];
  forgotten_boundary: number;
}

export interface RingSector {
  s: number;
}

export interface LayoutNode {
  id: string;
  x: number;
  y: number;
  outer_ring: { topic: string; s: number }[];
  inner_ring: { subtopic: string; s: number }[];
}

export interface LayoutPayload {
  analysis_version: number;
  topic_id: string;
  threshold: number;
  mode: "force" | "grid";
  converged: boolean;
  iterations: number;
  nodes: LayoutNode[];
  edges: { a: string; b: string; s: number }[];
}

export interface SearchHit {
  node_id: string;
  score: number;
  highlight_level: number;
}

export interface SearchPayload {
  analysis_version: number;
  hits: SearchHit[];
}

export interface KeywordsPayload {
  analysis_version: number;
  keywords: { term: string; weight: number; df: number }[];
}

export interface HighlightsPayload {
  analysis_version: number;
  levels: Record<string, number>;
}

export interface ForgottenPayload {
  analysis_version: number;
  budget: number;
  forgotten_boundary: number;
}

export interface AskResponse {
  answer: string;
  node_id: string;
  analysis_version: number;
}

export interface ApiClient {
  conversation(id: string): Promise<ConversationDoc>;
  topics(id: string): Promise<TopicsPayload>;
  globalLayout(id: string): Promise<GlobalGeometry>;
  topicLayout(
    id: string,
    topicId: string,
    mode: "force" | "grid",
    threshold: number,
    key: string,
    seed: number,
  ): Promise<LayoutPayload>;
  search(id: string, query: string, topK?: number | null, minScore?: number): Promise<SearchPayload>;
  keywords(id: string, from: number, to: number, topM?: number): Promise<KeywordsPayload>;
  highlights(id: string, term: string): Promise<HighlightsPayload>;
  forgotten(id: string, budget?: number): Promise<ForgottenPayload>;
  ask(id: string, question: string, contextNodeIds: string[]): Promise<AskResponse>;
}

export class ApiError extends Error {
  constructor(
    readonly status: number,
    readonly kind: string,
    detail: string,
  ) {
    super(detail);
  }
}

export class HttpApiClient implements ApiClient {
  constructor(private readonly base: string = "") {}

  private async request<T>(path: string, init?: RequestInit): Promise<T> {
    const response = await fetch(this.base + path, init);
    const body = await response.json();
    if (!response.ok) {
      throw new ApiError(response.status, body.error ?? "unknown", body.detail ?? "request failed");
    }
    return body as T;
  }

  private post<T>(path: string, payload: unknown): Promise<T> {
    return this.request<T>(path, {
      method: "POST",
      headers: { "content-type": "application/json" },
      body: JSON.stringify(payload),
    });
  }

  conversation(id: string): Promise<ConversationDoc> {
    return this.request(`/api/conversations/${id}`);
  }

  topics(id: string): Promise<TopicsPayload> {
    return this.request(`/api/conversations/${id}/topics`);
  }

  globalLayout(id: string): Promise<GlobalGeometry> {
    return this.request(`/api/conversations/${id}/layout/global`);
  }

  topicLayout(
    id: string,
    topicId: string,
    mode: "force" | "grid",
    threshold: number,
    key: string,
    seed: number,
  ): Promise<LayoutPayload> {
    const params = new URLSearchParams({
      mode,
      threshold: String(threshold),
      key,
      seed: String(seed),
    });
    return this.request(`/api/conversations/${id}/topics/${topicId}/layout?${params}`);
  }

  search(id: string, query: string, topK?: number | null, minScore?: number): Promise<SearchPayload> {
    return this.post(`/api/conversations/${id}/search`, {
      query,
      top_k: topK ?? null,
      min_score: minScore ?? null,
    });
  }

  keywords(id: string, from: number, to: number, topM = 20): Promise<KeywordsPayload> {
    return this.post(`/api/conversations/${id}/keywords`, { from, to, top_m: topM });
  }

  highlights(id: string, term: string): Promise<HighlightsPayload> {
    return this.request(`/api/conversations/${id}/highlights?term=${encodeURIComponent(term)}`);
  }

  forgotten(id: string, budget?: number): Promise<ForgottenPayload> {
    const suffix = budget === undefined ? "" : `?budget=${budget}`;
    return this.request(`/api/conversations/${id}/forgotten${suffix}`);
  }

  ask(id: string, question: string, contextNodeIds: string[]): Promise<AskResponse> {
    return this.post(`/api/conversations/${id}/ask`, {
      question,
      context_node_ids: contextNodeIds,
    });
  }
}
