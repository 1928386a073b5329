"""HTTP judgment-collection service.

Assigns pooled topics to assessors, serves document content, records
judgments and activity events append-only (JSON lines), and exports qrels and
the activity log.  All state is derived from the event log, so replaying the
log into a fresh store reproduces identical exports.

Assessor-facing payloads never reveal qrels version ids, run counts, rank
sums, or the ordering strategy.
"""

from __future__ import annotations

import threading
import time
from dataclasses import dataclass
from pathlib import Path

from pydantic import BaseModel

from .efficiency import ActivityEvent, event_from_json, event_to_json
from .model import LABEL_LEVELS, DataError, Qrels, Topic, serialize_qrels
from .pooling import SplitMix64, fnv1a64

__all__ = [
    "JudgmentRecord",
    "JudgmentIn",
    "AssessmentStore",
    "build_assignments",
    "create_app",
]


class JudgmentIn(BaseModel):
    """Request body for POST /api/judgment."""

    assessor: str
    topic: str
    doc: str
    label: str


@dataclass(frozen=True)
class JudgmentRecord:
    seq: int
    ts: int
    assessor: str
    topic: str
    doc: str
    label: str  # raw label; the latest record per (assessor, topic, doc) wins


def _now_ms() -> int:
    return int(time.time() * 1000)


def build_assignments(assessors: list, topics: list, versions: list,
                      seed: int = 0) -> dict:
    """Seeded round-robin over (topic, version) pairs, one version per
    (assessor, topic), with both strategies mixed for every assessor.

    Topics are shuffled with the seeded generator, then version i of the j-th
    topic goes to assessor (j + i) mod A, which needs at least as many
    assessors as versions.
    """
    if len(assessors) < len(versions):
        raise DataError(
            f"{len(assessors)} assessors cannot each take one version per topic "
            f"with {len(versions)} versions")
    order = list(topics)
    rng = SplitMix64(seed ^ fnv1a64(b"assignment"))
    for i in range(len(order) - 1, 0, -1):
        j = rng.next() % (i + 1)
        order[i], order[j] = order[j], order[i]
    assignments = {a: [] for a in assessors}
    for j, topic in enumerate(order):
        for i, version in enumerate(versions):
            assessor = assessors[(j + i) % len(assessors)]
            assignments[assessor].append((topic, version))
    return assignments


class AssessmentStore:
    """Event-sourced judgment store behind the HTTP endpoints.

    ``assignments`` maps assessor id -> list of (topic id, version id);
    ``orders`` maps (topic id, version id) -> presentation order (docids).
    If ``log_path`` exists its events are replayed to rebuild state; new
    events are appended to it through a single serialized appender.
    """

    def __init__(self, assignments: dict, orders: dict, topics: dict | None = None,
                 doc_dir=None, log_path=None, clock=_now_ms):
        self.assignments = {}
        seen = set()
        for assessor, pairs in assignments.items():
            for topic, version in pairs:
                if (assessor, topic) in seen:
                    raise DataError(f"assessor {assessor!r} assigned topic {topic!r} twice")
                seen.add((assessor, topic))
                if (topic, version) not in orders:
                    raise DataError(f"no presentation order for ({topic!r}, {version!r})")
            self.assignments[assessor] = list(pairs)
        self.orders = dict(orders)
        self.topics = dict(topics or {})
        self.doc_dir = Path(doc_dir) if doc_dir else None
        self.log_path = Path(log_path) if log_path else None
        self.clock = clock
        self._lock = threading.Lock()
        self.events: list = []
        self.records: list = []
        self._labels: dict = {}  # (assessor, topic) -> {doc: raw label}
        if self.log_path and self.log_path.exists():
            for lineno, line in enumerate(self.log_path.read_text(encoding="utf-8").splitlines(), 1):
                if line.strip():
                    self._apply(event_from_json(line))

    # -- event plumbing ----------------------------------------------------

    def _apply(self, event: ActivityEvent) -> None:
        """Add an event to in-memory state (no file write)."""
        self.events.append(event)
        if event.action == "judge":
            record = JudgmentRecord(seq=len(self.records) + 1, ts=event.ts,
                                    assessor=event.assessor, topic=event.topic,
                                    doc=event.doc, label=event.label)
            self.records.append(record)
            self._labels.setdefault((event.assessor, event.topic), {})[event.doc] = event.label

    def _append(self, event: ActivityEvent) -> None:
        with self._lock:
            self._apply(event)
            if self.log_path:
                with open(self.log_path, "a", encoding="utf-8") as fp:
                    fp.write(event_to_json(event) + "\n")

    # -- lookups -----------------------------------------------------------

    def _assignment(self, assessor: str, topic: str):
        for t, version in self.assignments.get(assessor, ()):
            if t == topic:
                return version
        return None

    def pool_order(self, assessor: str, topic: str):
        version = self._assignment(assessor, topic)
        if version is None:
            return None
        return self.orders[(topic, version)]

    def labels_for(self, assessor: str, topic: str) -> dict:
        return dict(self._labels.get((assessor, topic), {}))

    def progress(self, assessor: str, topic: str) -> tuple:
        order = self.pool_order(assessor, topic)
        judged = len(self._labels.get((assessor, topic), {}))
        return judged, len(order)

    def next_unjudged(self, assessor: str, topic: str, after_doc: str | None = None):
        """First unjudged doc in presentation order, scanning from just after
        ``after_doc`` and wrapping around; None when the topic is complete."""
        order = self.pool_order(assessor, topic)
        labels = self._labels.get((assessor, topic), {})
        start = 0
        if after_doc is not None and after_doc in order:
            start = order.index(after_doc) + 1
        rotated = list(order[start:]) + list(order[:start])
        for doc in rotated:
            if doc not in labels:
                return doc
        return None

    # -- operations --------------------------------------------------------

    def open_topic(self, assessor: str, topic: str) -> dict:
        version = self._assignment(assessor, topic)
        if version is None:
            raise KeyError(f"assessor {assessor!r} has no assignment for topic {topic!r}")
        self._append(ActivityEvent(ts=self.clock(), assessor=assessor, topic=topic,
                                   action="open_topic"))
        order = self.orders[(topic, version)]
        labels = self.labels_for(assessor, topic)
        meta = self.topics.get(topic) or Topic(qid=topic, content="")
        return {
            "topic": {"qid": meta.qid, "content": meta.content,
                      "description": meta.description},
            "docs": [{"doc": doc, "label": labels.get(doc)} for doc in order],
            "progress": {"judged": len(labels), "total": len(order)},
        }

    def view_doc(self, topic: str, doc: str, assessor: str | None = None) -> str:
        if assessor is not None and self._assignment(assessor, topic) is not None:
            self._append(ActivityEvent(ts=self.clock(), assessor=assessor, topic=topic,
                                       action="view_doc", doc=doc))
        if self.doc_dir is None:
            raise FileNotFoundError("no document directory configured")
        path = self.doc_dir / f"{doc}.html"
        if not path.exists():
            raise FileNotFoundError(f"no content for document {doc!r}")
        return path.read_text(encoding="utf-8")

    def judge(self, assessor: str, topic: str, doc: str, label: str) -> dict:
        version = self._assignment(assessor, topic)
        if version is None:
            raise KeyError(f"assessor {assessor!r} has no assignment for topic {topic!r}")
        order = self.orders[(topic, version)]
        if doc not in order:
            raise LookupError(f"document {doc!r} is not in the pool for topic {topic!r}")
        if label not in LABEL_LEVELS:
            raise DataError(f"bad label {label!r}; expected one of {sorted(LABEL_LEVELS)}")
        previous = self._labels.get((assessor, topic), {}).get(doc)
        self._append(ActivityEvent(ts=self.clock(), assessor=assessor, topic=topic,
                                   action="judge", doc=doc, label=label))
        next_doc = self.next_unjudged(assessor, topic, after_doc=doc)
        judged, total = self.progress(assessor, topic)
        return {
            "ok": True,
            "doc": doc,
            "label": label,
            "corrected": previous is not None and previous != label,
            "next_doc": next_doc,
            "topic_complete": next_doc is None,
            "progress": {"judged": judged, "total": total},
        }

    # -- exports -----------------------------------------------------------

    def versions(self) -> list:
        return sorted({v for pairs in self.assignments.values() for _, v in pairs})

    def export_qrels(self, version_id: str) -> str:
        if version_id not in self.versions():
            raise KeyError(f"unknown qrels version {version_id!r}")
        assigned = {(a, t) for a, pairs in self.assignments.items()
                    for t, v in pairs if v == version_id}
        entries: dict = {}
        for record in self.records:  # later records overwrite: latest label wins
            if (record.assessor, record.topic) in assigned:
                entries.setdefault(record.topic, {})[record.doc] = LABEL_LEVELS[record.label]
        qrels = Qrels(version_id=version_id, entries=entries)
        return serialize_qrels(qrels, header=f"qrels version={version_id}") or \
            f"# qrels version={version_id}\n"

    def export_log(self) -> str:
        lines = [event_to_json(e) for e in self.events]
        return "\n".join(lines) + "\n" if lines else "# activity log (empty)\n"


def create_app(store: AssessmentStore, ui_dir=None):
    """FastAPI app over an AssessmentStore.

    ``ui_dir`` optionally mounts a directory of static files — the browser
    judging interface — at the web root; the /api routes keep priority.
    """
    from fastapi import Body, FastAPI, HTTPException
    from fastapi.responses import PlainTextResponse

    app = FastAPI(title="poolbench judgment service")

    @app.get("/api/assignments/{assessor}")
    def get_assignments(assessor: str):
        if assessor not in store.assignments:
            raise HTTPException(404, f"unknown assessor {assessor!r}")
        topics = []
        for topic, _version in store.assignments[assessor]:
            judged, total = store.progress(assessor, topic)
            topics.append({"topic": topic, "judged": judged, "total": total})
        return {"assessor": assessor, "topics": topics}

    @app.get("/api/pool/{assessor}/{topic}")
    def get_pool(assessor: str, topic: str):
        try:
            return store.open_topic(assessor, topic)
        except KeyError as exc:
            raise HTTPException(404, str(exc)) from None

    @app.get("/api/doc/{topic}/{doc}")
    def get_doc(topic: str, doc: str, assessor: str | None = None):
        try:
            content = store.view_doc(topic, doc, assessor=assessor)
        except FileNotFoundError as exc:
            raise HTTPException(404, str(exc)) from None
        return {"topic": topic, "doc": doc, "content": content}

    @app.post("/api/judgment")
    def post_judgment(body: JudgmentIn = Body(...)):
        try:
            return store.judge(body.assessor, body.topic, body.doc, body.label)
        except KeyError as exc:
            raise HTTPException(404, str(exc)) from None
        except LookupError as exc:
            raise HTTPException(409, str(exc)) from None
        except DataError as exc:
            raise HTTPException(400, str(exc)) from None

    @app.get("/api/progress/{assessor}")
    def get_progress(assessor: str):
        if assessor not in store.assignments:
            raise HTTPException(404, f"unknown assessor {assessor!r}")
        topics = []
        judged_total = total_total = 0
        for topic, _version in store.assignments[assessor]:
            judged, total = store.progress(assessor, topic)
            judged_total += judged
            total_total += total
            topics.append({"topic": topic, "judged": judged, "total": total,
                           "complete": judged >= total})
        return {"assessor": assessor, "topics": topics,
                "judged": judged_total, "total": total_total}

    @app.get("/api/export/qrels/{version}", response_class=PlainTextResponse)
    def export_qrels(version: str):
        try:
            return store.export_qrels(version)
        except KeyError as exc:
            raise HTTPException(404, str(exc)) from None

    @app.get("/api/export/log", response_class=PlainTextResponse)
    def export_log():
        return store.export_log()

    if ui_dir is not None:
        from fastapi.staticfiles import StaticFiles

        app.mount("/", StaticFiles(directory=ui_dir, html=True), name="ui")

    return app
