/**
 * Judging session state machine.
 *
 * Pure state, no DOM and no network: the view renders from it and the queue
 * ships its outcomes to the service.  Rules it encodes:
 *
 *  - labeling an unjudged document advances the selection to the next
 *    unjudged one, scanning down the served order and wrapping around;
 *  - changing the label of an already-judged document keeps the selection
 *    where it is (the assessor is revisiting deliberately);
 *  - clicking the label a document already carries is a no-op and must not
 *    produce a service call.
 */

import type { Label, PoolDoc } from "./api.js";

export type ClickOutcome =
  | { kind: "ignored" }
  | { kind: "judged"; next: string | null }
  | { kind: "corrected" };

export class JudgingSession {
  readonly topic: string;
  private readonly docs: PoolDoc[];
  private readonly position = new Map<string, number>();
  private selectedDoc: string;

  constructor(topic: string, docs: readonly PoolDoc[]) {
    if (docs.length === 0) {
      throw new Error(`empty pool for topic ${topic}`);
    }
    this.topic = topic;
    this.docs = docs.map((d) => ({ doc: d.doc, label: d.label }));
    this.docs.forEach((d, i) => {
      if (this.position.has(d.doc)) {
        throw new Error(`duplicate document ${d.doc} in pool for topic ${topic}`);
      }
      this.position.set(d.doc, i);
    });
    // Resume where the assessor left off: first unjudged doc, else the top.
    this.selectedDoc = this.nextUnjudged(null) ?? this.docs[0].doc;
  }

  // ── Reads ──────────────────────────────────────────────────────────

  get selected(): string {
    return this.selectedDoc;
  }

  get order(): readonly PoolDoc[] {
    return this.docs;
  }

  get total(): number {
    return this.docs.length;
  }

  get judged(): number {
    return this.docs.filter((d) => d.label !== null).length;
  }

  get complete(): boolean {
    return this.judged === this.total;
  }

  labelOf(doc: string): Label | null {
    return this.docs[this.indexOf(doc)].label;
  }

  /**
   * First unjudged doc after `after` in served order, wrapping around;
   * null once the topic is complete.  Matches the service's own scan, so
   * the local advance and the service-returned `next_doc` agree.
   */
  nextUnjudged(after: string | null): string | null {
    const start = after === null ? 0 : this.indexOf(after) + 1;
    for (let k = 0; k < this.docs.length; k++) {
      const d = this.docs[(start + k) % this.docs.length];
      if (d.label === null) {
        return d.doc;
      }
    }
    return null;
  }

  // ── Transitions ────────────────────────────────────────────────────

  /** Explicit click in the document list; judging in any order is allowed. */
  select(doc: string): void {
    this.selectedDoc = this.docs[this.indexOf(doc)].doc;
  }

  /** Move the selection one row down (+1) or up (-1), wrapping. */
  selectStep(delta: 1 | -1): void {
    const i = this.indexOf(this.selectedDoc);
    const n = this.docs.length;
    this.selectedDoc = this.docs[(i + delta + n) % n].doc;
  }

  /**
   * Apply a label click.  Exactly the non-"ignored" outcomes correspond to
   * one service call each; the badge updates immediately (optimistically),
   * before the service acknowledges.
   */
  applyLabel(doc: string, label: Label): ClickOutcome {
    const i = this.indexOf(doc);
    const previous = this.docs[i].label;
    if (previous === label) {
      return { kind: "ignored" };
    }
    this.docs[i].label = label;
    if (previous !== null) {
      return { kind: "corrected" };
    }
    const next = this.nextUnjudged(doc);
    if (next !== null) {
      this.selectedDoc = next;
    }
    return { kind: "judged", next };
  }

  private indexOf(doc: string): number {
    const i = this.position.get(doc);
    if (i === undefined) {
      throw new Error(`document ${doc} is not in the pool for topic ${this.topic}`);
    }
    return i;
  }
}
