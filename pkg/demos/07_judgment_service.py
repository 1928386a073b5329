"""
Collecting judgments: an append-only, replayable assessment service
===================================================================

Assessors judge pooled documents topic by topic.  Every action is
appended to a JSON-lines activity log, the qrels are a pure function of
that log (latest label wins), and replaying the log reconstructs the
whole store.  Assessors never learn which ordering strategy produced
their pool or which runs contributed a document.
"""

import tempfile
from pathlib import Path

from poolbench.model import RankedRun
from poolbench.pooling import PoolConfig, build_ordered_pool
from poolbench.service import AssessmentStore, build_assignments

# Pool one topic under two ordering strategies; each (topic, version)
# pair is judged by exactly one assessor.
runs = [
    RankedRun("sys-alpha", {"101": ["web04", "web01", "web07"]}),
    RankedRun("sys-beta", {"101": ["web01", "web04", "web03"]}),
]
orders = {
    ("101", "RND1"): build_ordered_pool(
        runs, "101", PoolConfig(depth=3, strategy="RND", seed=5)).presentation_order,
    ("101", "PRI1"): build_ordered_pool(
        runs, "101", PoolConfig(depth=3, strategy="PRI")).presentation_order,
}

assignments = build_assignments(["ann", "ben"], ["101"], ["RND1", "PRI1"], seed=5)
print("assignments:", assignments)

log_path = Path(tempfile.mkdtemp()) / "activity.jsonl"
store = AssessmentStore(assignments, orders, log_path=log_path)

# Ann opens her topic: she sees the documents in her pool order with their
# current badges, but nothing about strategies or contributing runs.
ann_topic, ann_version = assignments["ann"][0]
payload = store.open_topic("ann", ann_topic)
print("ann sees:", [d["doc"] for d in payload["docs"]])

# Judging an unjudged document advances to the next unjudged one; judging
# an already-judged document is a correction and stays put.
for doc in payload["docs"]:
    outcome = store.judge("ann", ann_topic, doc["doc"], "REL")
print("after first pass:", store.progress("ann", ann_topic))
correction = store.judge("ann", ann_topic, payload["docs"][0]["doc"], "H.REL")
print("correction recorded:", correction["corrected"], "-", correction["label"])

# The qrels export is the latest label per document, as a qrels file.
print(store.export_qrels(ann_version))

# The log is the source of truth: a fresh store replaying it reports the
# same state and exports byte-identical qrels.
replayed = AssessmentStore(assignments, orders, log_path=log_path)
assert replayed.export_qrels(ann_version) == store.export_qrels(ann_version)
print("replay reproduces the export; log has",
      len(log_path.read_text().splitlines()), "events")
