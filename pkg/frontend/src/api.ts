/**
 * Typed client for the judgment service HTTP API.
 *
 * These types mirror exactly what the service exposes to assessors and
 * nothing more: no qrels version ids, no run counts or rank sums, no
 * ordering-strategy names.  The view layer depends on the `ApiClient`
 * interface so tests can substitute an in-memory fake.
 */

export type Label = "H.REL" | "REL" | "NONREL" | "ERROR";

export const LABELS: readonly Label[] = ["H.REL", "REL", "NONREL", "ERROR"];

export interface TopicSummary {
  topic: string;
  judged: number;
  total: number;
}

export interface AssignmentList {
  assessor: string;
  topics: TopicSummary[];
}

export interface PoolDoc {
  doc: string;
  label: Label | null;
}

export interface PoolView {
  topic: { qid: string; content: string; description: string };
  docs: PoolDoc[];
  progress: { judged: number; total: number };
}

export interface DocContent {
  topic: string;
  doc: string;
  content: string;
}

export interface JudgmentPayload {
  assessor: string;
  topic: string;
  doc: string;
  label: Label;
}

export interface JudgmentReply {
  ok: boolean;
  doc: string;
  label: Label;
  corrected: boolean;
  next_doc: string | null;
  topic_complete: boolean;
  progress: { judged: number; total: number };
}

export interface ProgressTopic extends TopicSummary {
  complete: boolean;
}

export interface ProgressRollup {
  assessor: string;
  topics: ProgressTopic[];
  judged: number;
  total: number;
}

/** Everything the view layer needs from the service. */
export interface ApiClient {
  assignments(assessor: string): Promise<AssignmentList>;
  pool(assessor: string, topic: string): Promise<PoolView>;
  doc(assessor: string, topic: string, doc: string): Promise<DocContent>;
  judge(payload: JudgmentPayload): Promise<JudgmentReply>;
  progress(assessor: string): Promise<ProgressRollup>;
}

/**
 * fetch-backed client.  `base` is "" when the UI is served by the judgment
 * service itself (the normal setup); point it elsewhere for development.
 */
export class HttpApiClient implements ApiClient {
  constructor(private readonly base: string = "") {}

  private async get<T>(path: string): Promise<T> {
    const res = await fetch(this.base + path);
    if (!res.ok) {
      throw new Error(`GET ${path} failed: ${res.status} ${res.statusText}`);
    }
    return (await res.json()) as T;
  }

  assignments(assessor: string): Promise<AssignmentList> {
    return this.get(`/api/assignments/${encodeURIComponent(assessor)}`);
  }

  pool(assessor: string, topic: string): Promise<PoolView> {
    return this.get(
      `/api/pool/${encodeURIComponent(assessor)}/${encodeURIComponent(topic)}`,
    );
  }

  doc(assessor: string, topic: string, doc: string): Promise<DocContent> {
    return this.get(
      `/api/doc/${encodeURIComponent(topic)}/${encodeURIComponent(doc)}` +
        `?assessor=${encodeURIComponent(assessor)}`,
    );
  }

  async judge(payload: JudgmentPayload): Promise<JudgmentReply> {
    const res = await fetch(this.base + "/api/judgment", {
      method: "POST",
      headers: { "Content-Type": "application/json" },
      body: JSON.stringify(payload),
    });
    if (!res.ok) {
      throw new Error(`POST /api/judgment failed: ${res.status} ${res.statusText}`);
    }
    return (await res.json()) as JudgmentReply;
  }

  progress(assessor: string): Promise<ProgressRollup> {
    return this.get(`/api/progress/${encodeURIComponent(assessor)}`);
  }
}
