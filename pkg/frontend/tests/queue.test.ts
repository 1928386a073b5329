import { describe, expect, it } from "vitest";

import type { JudgmentPayload, JudgmentReply } from "../src/api.js";
import { JudgmentQueue } from "../src/queue.js";

function payload(doc: string): JudgmentPayload {
  return { assessor: "ann", topic: "t1", doc, label: "REL" };
}

function replyFor(p: JudgmentPayload): JudgmentReply {
  return {
    ok: true,
    doc: p.doc,
    label: p.label,
    corrected: false,
    next_doc: null,
    topic_complete: false,
    progress: { judged: 0, total: 0 },
  };
}

describe("JudgmentQueue", () => {
  it("delivers judgments in click order", async () => {
    const sent: string[] = [];
    const queue = new JudgmentQueue(async (p) => {
      sent.push(p.doc);
      return replyFor(p);
    });
    queue.push(payload("a"));
    queue.push(payload("b"));
    queue.push(payload("c"));
    await queue.flush();
    expect(sent).toEqual(["a", "b", "c"]);
    expect(queue.unsent).toBe(0);
  });

  it("keeps a failed judgment queued and counts it as unsent", async () => {
    let failing = true;
    const sent: string[] = [];
    const errors: unknown[] = [];
    const queue = new JudgmentQueue(
      async (p) => {
        if (failing) {
          throw new Error("network down");
        }
        sent.push(p.doc);
        return replyFor(p);
      },
      { onError: (err) => errors.push(err) },
    );
    queue.push(payload("a"));
    queue.push(payload("b"));
    await queue.flush();
    expect(queue.unsent).toBe(2);
    expect(errors).toHaveLength(1);
    expect(sent).toEqual([]);

    failing = false;
    queue.retry();
    await queue.flush();
    expect(sent).toEqual(["a", "b"]); // nothing duplicated, nothing dropped
    expect(queue.unsent).toBe(0);
  });

  it("sends at most one request at a time", async () => {
    let inFlight = 0;
    let peak = 0;
    const queue = new JudgmentQueue(async (p) => {
      inFlight += 1;
      peak = Math.max(peak, inFlight);
      await new Promise((resolve) => setTimeout(resolve, 1));
      inFlight -= 1;
      return replyFor(p);
    });
    for (const doc of ["a", "b", "c", "d"]) {
      queue.push(payload(doc));
    }
    await queue.flush();
    expect(peak).toBe(1);
    expect(queue.unsent).toBe(0);
  });

  it("picks up judgments pushed while a send is in flight", async () => {
    const sent: string[] = [];
    const queue = new JudgmentQueue(async (p) => {
      await new Promise((resolve) => setTimeout(resolve, 1));
      sent.push(p.doc);
      if (p.doc === "a") {
        queue.push(payload("late"));
      }
      return replyFor(p);
    });
    queue.push(payload("a"));
    queue.push(payload("b"));
    await queue.flush();
    expect(sent).toEqual(["a", "b", "late"]);
  });

  it("reports acknowledgements and unsent-count changes", async () => {
    const acked: string[] = [];
    const counts: number[] = [];
    const queue = new JudgmentQueue(async (p) => replyFor(p), {
      onSent: (p, reply) => {
        expect(reply.doc).toBe(p.doc);
        acked.push(p.doc);
      },
      onChange: (unsent) => counts.push(unsent),
    });
    queue.push(payload("a"));
    queue.push(payload("b"));
    await queue.flush();
    expect(acked).toEqual(["a", "b"]);
    expect(counts[0]).toBe(1); // first push
    expect(counts[counts.length - 1]).toBe(0); // all delivered
  });
});
