/**
 * App shell — topic list landing screen and the two-panel judging screen.
 *
 * Left panel: the pooled documents in served order with label badges.
 * Right panel: the selected document, rendered in a sandboxed iframe.
 * Four buttons (H.REL / REL / NONREL / ERROR) judge the selected document;
 * judging an unjudged document auto-advances to the next unjudged one,
 * while re-labeling an already-judged document stays put.  Failed sends
 * accumulate in a retry queue behind a visible unsent-count pill.
 *
 * The screen shows nothing about how the pool was built — no run counts,
 * no rank sums, no ordering-strategy or qrels-version names.
 */

import type { ApiClient, Label, TopicSummary } from "./api.js";
import { LABELS } from "./api.js";
import { JudgingSession } from "./session.js";
import { JudgmentQueue } from "./queue.js";

/** Label definitions from the assessor manual, shown in the help drawer. */
const LABEL_HELP: readonly { label: Label; text: string }[] = [
  {
    label: "H.REL",
    text: "highly relevant - it is <strong>likely</strong> that the user with the information need shown will find this page relevant.",
  },
  {
    label: "REL",
    text: "relevant - it is <strong>possible</strong> that the user with the information need shown will find this page relevant.",
  },
  {
    label: "NONREL",
    text: "nonrelevant - it is <strong>unlikely</strong> that the user with the information need shown will find this page relevant.",
  },
  {
    label: "ERROR",
    text: "the right panel does not show any contents at all, even after waiting for a few seconds for the content to load.",
  },
];

const RETRY_INTERVAL_MS = 5000;

function esc(text: string): string {
  const div = document.createElement("div");
  div.textContent = text;
  return div.innerHTML;
}

export class App {
  private readonly root: HTMLElement;
  private readonly api: ApiClient;
  private readonly assessor: string;

  // Judging state (null while on the topic list)
  private session: JudgingSession | null = null;
  private queue: JudgmentQueue | null = null;
  private retryTimer: ReturnType<typeof setInterval> | null = null;
  private keyHandler: ((e: KeyboardEvent) => void) | null = null;

  // DOM refs for the judging screen
  private docList: HTMLElement | null = null;
  private docPane: HTMLElement | null = null;
  private progressText: HTMLElement | null = null;
  private progressFill: HTMLElement | null = null;
  private unsentPill: HTMLElement | null = null;
  private banner: HTMLElement | null = null;

  constructor(root: HTMLElement, api: ApiClient, assessor: string) {
    this.root = root;
    this.api = api;
    this.assessor = assessor;
  }

  async start(): Promise<void> {
    await this.showTopicList();
  }

  // ── Topic list (landing screen) ────────────────────────────────────

  private async showTopicList(): Promise<void> {
    this.teardownJudging();
    this.root.innerHTML = `<div class="loading">Loading assignments…</div>`;
    let topics: TopicSummary[];
    try {
      topics = (await this.api.assignments(this.assessor)).topics;
    } catch (err) {
      this.root.innerHTML = `
        <div class="error-screen">
          <h2>Could not load assignments</h2>
          <p>${esc(String(err))}</p>
          <button id="reload-btn">Try again</button>
        </div>
      `;
      this.root.querySelector("#reload-btn")!.addEventListener("click", () => {
        void this.showTopicList();
      });
      return;
    }

    const done = topics.filter((t) => t.judged >= t.total).length;
    this.root.innerHTML = `
      <header class="bar">
        <span class="bar-title">Relevance assessment</span>
        <span class="bar-right">${esc(this.assessor)} · ${done}/${topics.length} topics done</span>
      </header>
      <main class="topic-list" id="topic-list"></main>
    `;
    const list = this.root.querySelector("#topic-list")!;
    for (const t of topics) {
      const pct = t.total > 0 ? Math.round((100 * t.judged) / t.total) : 0;
      const card = document.createElement("button");
      card.className = "topic-card" + (t.judged >= t.total ? " done" : "");
      card.innerHTML = `
        <span class="topic-id">${esc(t.topic)}</span>
        <span class="topic-progress">${t.judged} / ${t.total} judged</span>
        <span class="meter"><span class="meter-fill" style="width: ${pct}%"></span></span>
      `;
      card.addEventListener("click", () => {
        void this.openTopic(t.topic);
      });
      list.appendChild(card);
    }
  }

  // ── Judging screen ─────────────────────────────────────────────────

  private async openTopic(topic: string): Promise<void> {
    this.root.innerHTML = `<div class="loading">Loading pool for topic ${esc(topic)}…</div>`;
    let view;
    try {
      view = await this.api.pool(this.assessor, topic);
    } catch (err) {
      this.root.innerHTML = `
        <div class="error-screen">
          <h2>Could not load topic ${esc(topic)}</h2>
          <p>${esc(String(err))}</p>
          <button id="back-btn">Back to topics</button>
        </div>
      `;
      this.root.querySelector("#back-btn")!.addEventListener("click", () => {
        void this.showTopicList();
      });
      return;
    }

    this.session = new JudgingSession(topic, view.docs);
    this.queue = new JudgmentQueue((p) => this.api.judge(p), {
      onChange: () => this.renderUnsent(),
      onError: () => this.renderUnsent(),
    });
    this.retryTimer = setInterval(() => {
      if (this.queue && this.queue.unsent > 0) {
        this.queue.retry();
      }
    }, RETRY_INTERVAL_MS);

    this.renderJudgingScreen(view.topic);
    this.renderDocList();
    this.renderProgress();
    void this.showDoc(this.session.selected);
  }

  private renderJudgingScreen(topic: { qid: string; content: string; description: string }): void {
    this.root.innerHTML = `
      <header class="bar">
        <button class="bar-link" id="back-btn">&larr; Topics</button>
        <span class="bar-title">Topic ${esc(topic.qid)}</span>
        <span class="bar-right">
          <button class="unsent-pill hidden" id="unsent-pill" title="Judgments not yet saved; click to retry now"></button>
          <span class="progress-text" id="progress-text"></span>
          <span class="meter"><span class="meter-fill" id="progress-fill"></span></span>
          <button class="bar-link" id="help-btn">Labels?</button>
        </span>
      </header>
      <div class="query-box">
        <span class="query">${esc(topic.content)}</span>
        ${topic.description ? `<span class="query-desc">${esc(topic.description)}</span>` : ""}
      </div>
      <div class="banner hidden" id="banner">
        All documents for this topic are judged. You can still revisit and correct labels.
      </div>
      <main class="panels">
        <nav class="doc-list" id="doc-list"></nav>
        <section class="doc-view">
          <div class="label-buttons" id="label-buttons"></div>
          <div class="doc-pane" id="doc-pane"></div>
        </section>
      </main>
      <aside class="help-drawer hidden" id="help-drawer">
        <h3>Choose one of the following for each document</h3>
        <dl>
          ${LABEL_HELP.map(
            (h) => `<dt class="badge badge-${h.label.replace(".", "")}">${h.label}</dt><dd>${h.text}</dd>`,
          ).join("")}
        </dl>
        <p class="help-keys">Keys: 1-4 apply the labels above; &uarr;/&darr; move the selection.</p>
        <button id="help-close">Close</button>
      </aside>
    `;

    this.docList = this.root.querySelector<HTMLElement>("#doc-list");
    this.docPane = this.root.querySelector<HTMLElement>("#doc-pane");
    this.progressText = this.root.querySelector<HTMLElement>("#progress-text");
    this.progressFill = this.root.querySelector<HTMLElement>("#progress-fill");
    this.unsentPill = this.root.querySelector<HTMLElement>("#unsent-pill");
    this.banner = this.root.querySelector<HTMLElement>("#banner");

    this.root.querySelector("#back-btn")!.addEventListener("click", () => {
      void this.showTopicList();
    });
    this.unsentPill!.addEventListener("click", () => this.queue?.retry());

    const drawer = this.root.querySelector<HTMLElement>("#help-drawer")!;
    this.root.querySelector("#help-btn")!.addEventListener("click", () => {
      drawer.classList.toggle("hidden");
    });
    this.root.querySelector("#help-close")!.addEventListener("click", () => {
      drawer.classList.add("hidden");
    });

    const buttons = this.root.querySelector<HTMLElement>("#label-buttons")!;
    LABELS.forEach((label, i) => {
      const btn = document.createElement("button");
      btn.className = `label-btn label-${label.replace(".", "")}`;
      btn.dataset.label = label;
      btn.innerHTML = `<kbd>${i + 1}</kbd> ${label}`;
      btn.addEventListener("click", () => this.onLabelClick(label));
      buttons.appendChild(btn);
    });

    this.keyHandler = (e) => this.onKey(e);
    document.addEventListener("keydown", this.keyHandler);
  }

  private teardownJudging(): void {
    if (this.retryTimer !== null) {
      clearInterval(this.retryTimer);
      this.retryTimer = null;
    }
    if (this.keyHandler !== null) {
      document.removeEventListener("keydown", this.keyHandler);
      this.keyHandler = null;
    }
    this.session = null;
    this.queue = null;
    this.docList = null;
    this.docPane = null;
    this.progressText = null;
    this.progressFill = null;
    this.unsentPill = null;
    this.banner = null;
  }

  // ── Rendering ──────────────────────────────────────────────────────

  private renderDocList(): void {
    if (!this.session || !this.docList) {
      return;
    }
    this.docList.innerHTML = "";
    for (const { doc, label } of this.session.order) {
      const row = document.createElement("button");
      row.className = "doc-row" + (doc === this.session.selected ? " selected" : "");
      row.innerHTML = `
        <span class="doc-id">${esc(doc)}</span>
        ${label ? `<span class="badge badge-${label.replace(".", "")}">${label}</span>` : `<span class="badge badge-none">&mdash;</span>`}
      `;
      row.addEventListener("click", () => {
        this.session!.select(doc);
        this.renderDocList();
        void this.showDoc(doc);
      });
      this.docList.appendChild(row);
    }
    const selectedRow = this.docList.querySelector<HTMLElement>(".doc-row.selected");
    selectedRow?.scrollIntoView({ block: "nearest" });
    this.highlightLabelButtons();
  }

  private highlightLabelButtons(): void {
    if (!this.session) {
      return;
    }
    const current = this.session.labelOf(this.session.selected);
    this.root.querySelectorAll<HTMLElement>(".label-btn").forEach((btn) => {
      btn.classList.toggle("active", btn.dataset.label === current);
    });
  }

  private renderProgress(): void {
    if (!this.session || !this.progressText || !this.progressFill || !this.banner) {
      return;
    }
    const { judged, total } = this.session;
    this.progressText.textContent = `${judged} / ${total} judged`;
    const pct = total > 0 ? Math.round((100 * judged) / total) : 0;
    this.progressFill.style.width = `${pct}%`;
    this.banner.classList.toggle("hidden", !this.session.complete);
  }

  private renderUnsent(): void {
    if (!this.unsentPill || !this.queue) {
      return;
    }
    const n = this.queue.unsent;
    this.unsentPill.textContent = `${n} unsent`;
    this.unsentPill.classList.toggle("hidden", n === 0);
  }

  private async showDoc(doc: string): Promise<void> {
    if (!this.session || !this.docPane) {
      return;
    }
    const topic = this.session.topic;
    this.docPane.innerHTML = `<div class="loading">Loading ${esc(doc)}…</div>`;
    try {
      const { content } = await this.api.doc(this.assessor, topic, doc);
      if (this.session?.selected !== doc) {
        return; // the assessor moved on while we were fetching
      }
      const frame = document.createElement("iframe");
      frame.className = "doc-frame";
      frame.setAttribute("sandbox", ""); // isolate pooled web content entirely
      frame.srcdoc = content;
      this.docPane.innerHTML = "";
      this.docPane.appendChild(frame);
    } catch (err) {
      if (this.session?.selected !== doc) {
        return;
      }
      this.docPane.innerHTML = `
        <div class="doc-error">
          <h3>No content for ${esc(doc)}</h3>
          <p>${esc(String(err))}</p>
          <p>If the page never shows any contents, even after waiting a few
             seconds, choose <strong>ERROR</strong>.</p>
        </div>
      `;
    }
  }

  // ── Judging ────────────────────────────────────────────────────────

  private onLabelClick(label: Label): void {
    if (!this.session || !this.queue) {
      return;
    }
    const doc = this.session.selected;
    const outcome = this.session.applyLabel(doc, label);
    if (outcome.kind === "ignored") {
      return; // same label as before: no service call
    }
    this.queue.push({ assessor: this.assessor, topic: this.session.topic, doc, label });
    this.renderDocList();
    this.renderProgress();
    if (outcome.kind === "judged" && this.session.selected !== doc) {
      void this.showDoc(this.session.selected);
    }
  }

  private onKey(e: KeyboardEvent): void {
    if (!this.session || e.ctrlKey || e.altKey || e.metaKey) {
      return;
    }
    const target = e.target as HTMLElement | null;
    if (target && (target.tagName === "INPUT" || target.tagName === "TEXTAREA")) {
      return;
    }
    const digit = Number.parseInt(e.key, 10);
    if (digit >= 1 && digit <= LABELS.length) {
      this.onLabelClick(LABELS[digit - 1]);
      e.preventDefault();
      return;
    }
    if (e.key === "ArrowDown" || e.key === "j") {
      this.session.selectStep(1);
    } else if (e.key === "ArrowUp" || e.key === "k") {
      this.session.selectStep(-1);
    } else {
      return;
    }
    e.preventDefault();
    this.renderDocList();
    void this.showDoc(this.session.selected);
  }
}
