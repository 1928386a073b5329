/**
 * Outbound judgment queue.
 *
 * Judgments are sent strictly in click order, one request in flight at a
 * time.  When a send fails the judgment stays queued — the optimistic badge
 * is already on screen — and the unsent count goes up; `retry()` restarts
 * delivery.  Nothing is duplicated on retry and nothing is dropped.
 */

import type { JudgmentPayload, JudgmentReply } from "./api.js";

export type SendFn = (payload: JudgmentPayload) => Promise<JudgmentReply>;

export interface QueueEvents {
  /** A payload was acknowledged by the service. */
  onSent?: (payload: JudgmentPayload, reply: JudgmentReply) => void;
  /** The unsent count changed (push or successful send). */
  onChange?: (unsent: number) => void;
  /** A send failed; the payload stays queued. */
  onError?: (err: unknown) => void;
}

export class JudgmentQueue {
  private readonly pending: JudgmentPayload[] = [];
  private inflight: Promise<void> | null = null;

  constructor(
    private readonly send: SendFn,
    private readonly events: QueueEvents = {},
  ) {}

  /** Judgments accepted from clicks but not yet acknowledged. */
  get unsent(): number {
    return this.pending.length;
  }

  push(payload: JudgmentPayload): void {
    this.pending.push(payload);
    this.events.onChange?.(this.unsent);
    void this.flush();
  }

  /** Restart delivery after a failure (wired to a button and a timer). */
  retry(): void {
    void this.flush();
  }

  /**
   * Resolves once the queue is empty or a send has failed.  Joins the
   * in-flight drain if one is already running, so awaiting it after a
   * push always observes that push's fate.
   */
  flush(): Promise<void> {
    if (!this.inflight) {
      this.inflight = this.drain().finally(() => {
        this.inflight = null;
      });
    }
    return this.inflight;
  }

  private async drain(): Promise<void> {
    while (this.pending.length > 0) {
      const head = this.pending[0];
      let reply: JudgmentReply;
      try {
        reply = await this.send(head);
      } catch (err) {
        this.events.onError?.(err);
        return; // head stays queued for retry
      }
      this.pending.shift();
      this.events.onChange?.(this.unsent);
      this.events.onSent?.(head, reply);
    }
  }
}
