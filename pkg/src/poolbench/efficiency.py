"""Assessor activity logs and the five judging-efficiency criteria.

Per (assessor, topic) timeline: TJ1D (time to first judgment, NA above 3 min),
TF1RH / TF1H (time to first relevant / highly-relevant find, NA above 30 min),
ATBJ (mean inter-judgment gap, gaps above 3 min excluded), and NREJ (number of
label-changing re-judgments).  Aggregation into topic x version tables uses
criterion-specific listwise NA deletion.
"""

from __future__ import annotations

import json
import warnings
from dataclasses import dataclass

from .model import LABEL_LEVELS, DataError

__all__ = [
    "ActivityEvent",
    "EfficiencyStats",
    "ACTIONS",
    "CRITERIA",
    "event_to_json",
    "event_from_json",
    "parse_activity_log",
    "efficiency_stats",
    "efficiency_table",
]

ACTIONS = ("open_topic", "view_doc", "judge")
CRITERIA = ("tj1d", "tf1rh", "tf1h", "atbj", "nrej")

_FIRST_JUDGE_MAX_S = 180.0  # TJ1D outlier bound (3 minutes)
_FIND_MAX_S = 1800.0  # TF1RH / TF1H outlier bound (30 minutes)
_GAP_MAX_S = 180.0  # ATBJ gap exclusion bound (3 minutes)


@dataclass(frozen=True)
class ActivityEvent:
    """One timestamped assessor action (milliseconds since epoch)."""

    ts: int
    assessor: str
    topic: str
    action: str
    doc: str | None = None  # absent for open_topic
    label: str | None = None  # judge events only

    def __post_init__(self):
        if self.action not in ACTIONS:
            raise DataError(f"unknown action {self.action!r}")
        if self.action == "judge":
            if self.doc is None:
                raise DataError("judge event without a doc")
            if self.label not in LABEL_LEVELS:
                raise DataError(f"judge event with bad label {self.label!r}")
        if self.action == "view_doc" and self.doc is None:
            raise DataError("view_doc event without a doc")


@dataclass(frozen=True)
class EfficiencyStats:
    """The five criteria for one (assessor, topic) timeline; None marks NA."""

    assessor: str
    topic: str
    tj1d: float | None
    tf1rh: float | None
    tf1h: float | None
    atbj: float | None
    nrej: int

    def value(self, criterion: str):
        if criterion not in CRITERIA:
            raise DataError(f"unknown criterion {criterion!r}; expected one of {CRITERIA}")
        return getattr(self, criterion)


def event_to_json(event: ActivityEvent) -> str:
    obj = {"ts": event.ts, "assessor": event.assessor, "topic": event.topic}
    if event.doc is not None:
        obj["doc"] = event.doc
    obj["action"] = event.action
    if event.label is not None:
        obj["label"] = event.label
    return json.dumps(obj, ensure_ascii=False)


def event_from_json(line: str) -> ActivityEvent:
    obj = json.loads(line)
    return ActivityEvent(ts=int(obj["ts"]), assessor=str(obj["assessor"]),
                         topic=str(obj["topic"]), action=str(obj["action"]),
                         doc=obj.get("doc"), label=obj.get("label"))


def parse_activity_log(path) -> dict:
    """Group a JSON-lines activity log into per-(assessor, topic) timelines.

    Timelines are sorted by timestamp (stable, with a warning when the file
    order was not monotone) and must start with an open_topic event.
    """
    timelines: dict = {}
    first_line: dict = {}
    with open(path, encoding="utf-8") as fp:
        for lineno, line in enumerate(fp, 1):
            if not line.strip():
                continue
            try:
                event = event_from_json(line)
            except (json.JSONDecodeError, KeyError, DataError) as exc:
                raise DataError(f"{path}:{lineno}: bad event: {exc}") from None
            key = (event.assessor, event.topic)
            if key not in timelines:
                if event.action != "open_topic":
                    raise DataError(
                        f"{path}:{lineno}: first event for assessor {event.assessor!r} "
                        f"topic {event.topic!r} is {event.action!r}, expected open_topic")
                first_line[key] = lineno
            timelines[key] = timelines.get(key, [])
            timelines[key].append(event)
    for key, events in timelines.items():
        if any(a.ts > b.ts for a, b in zip(events, events[1:])):
            warnings.warn(f"non-monotone timestamps for {key}; stable-sorting")
            events.sort(key=lambda e: e.ts)
        if events[0].action != "open_topic":
            raise DataError(
                f"{path}:{first_line[key]}: timeline for {key} does not start with open_topic")
    return timelines


def efficiency_stats(timeline: list) -> EfficiencyStats:
    """Compute the five criteria from one (assessor, topic) timeline."""
    if not timeline or timeline[0].action != "open_topic":
        raise DataError("timeline must start with an open_topic event")
    opened = timeline[0].ts
    assessor, topic = timeline[0].assessor, timeline[0].topic

    judges = [e for e in timeline if e.action == "judge"]

    def seconds_to(event):
        return (event.ts - opened) / 1000.0

    tj1d = None
    if judges:
        first = seconds_to(judges[0])
        tj1d = first if first <= _FIRST_JUDGE_MAX_S else None

    def first_find(wanted):
        for e in judges:
            if e.label in wanted:
                t = seconds_to(e)
                return t if t <= _FIND_MAX_S else None
        return None

    tf1rh = first_find({"REL", "H.REL"})
    tf1h = first_find({"H.REL"})

    gaps = [(b.ts - a.ts) / 1000.0 for a, b in zip(judges, judges[1:])]
    kept = [g for g in gaps if g <= _GAP_MAX_S]
    atbj = sum(kept) / len(kept) if kept else None

    nrej = 0
    current: dict = {}
    for e in judges:
        previous = current.get(e.doc)
        if previous is not None and previous != e.label:
            nrej += 1
        current[e.doc] = e.label

    return EfficiencyStats(assessor=assessor, topic=topic, tj1d=tj1d,
                           tf1rh=tf1rh, tf1h=tf1h, atbj=atbj, nrej=nrej)


def efficiency_table(stats_by_cell: dict, criterion: str, versions: list):
    """Topic x version table for one criterion with listwise NA deletion.

    ``stats_by_cell`` maps (topic, version id) -> EfficiencyStats.  A topic is
    kept only if every version has a cell with a non-NA value for this
    criterion.  Returns (kept topic list, rows aligned with ``versions``).
    """
    if criterion not in CRITERIA:
        raise DataError(f"unknown criterion {criterion!r}; expected one of {CRITERIA}")
    topics = sorted({topic for topic, _ in stats_by_cell})
    kept, rows = [], []
    for topic in topics:
        row = []
        for version in versions:
            cell = stats_by_cell.get((topic, version))
            value = cell.value(criterion) if cell is not None else None
            row.append(value)
        if all(v is not None for v in row):
            kept.append(topic)
            rows.append([float(v) for v in row])
    return kept, rows
