"""Domain types and parsers/serializers for runs, topics, qrels, label matrices and score matrices.

All types are immutable after construction and all operations are pure, so
everything here is safe for concurrent reads and data-parallel use across topics.
"""

from __future__ import annotations

import re
from dataclasses import dataclass, field

__all__ = [
    "DataError",
    "LABEL_LEVELS",
    "RelevanceLabel",
    "Topic",
    "RankedRun",
    "Qrels",
    "LabelMatrix",
    "ScoreMatrix",
    "NA",
    "parse_run_file",
    "serialize_run",
    "parse_qrels_file",
    "serialize_qrels",
    "parse_topics_file",
    "parse_label_matrix",
    "serialize_label_matrix",
    "parse_score_matrix",
    "assemble_qrels",
]


class DataError(ValueError):
    """Malformed or inconsistent input data (file parse errors, bad labels, ...)."""


# Raw judging labels and their graded relevance levels.  The mapping is total
# and fixed: rendering failures (ERROR) count as not relevant.
LABEL_LEVELS = {"H.REL": 2, "REL": 1, "NONREL": 0, "ERROR": 0}

#: Cell value for "this coder did not judge this unit" in a LabelMatrix.
NA = -1


@dataclass(frozen=True)
class RelevanceLabel:
    """A raw judging label together with its graded relevance level."""

    raw: str
    level: int

    @classmethod
    def from_raw(cls, raw: str) -> "RelevanceLabel":
        if raw not in LABEL_LEVELS:
            raise DataError(f"unknown label {raw!r}; expected one of {sorted(LABEL_LEVELS)}")
        return cls(raw=raw, level=LABEL_LEVELS[raw])


@dataclass(frozen=True)
class Topic:
    """A search topic: 4-digit zero-padded id, query text, and intent narrative."""

    qid: str
    content: str
    description: str = ""


@dataclass(frozen=True)
class RankedRun:
    """One system's ranked output: per-topic document lists in rank order."""

    run_tag: str
    rankings: dict  # topic id -> list of docids, rank 1 first
    team_id: str = ""

    def topics(self) -> list:
        return sorted(self.rankings)

    def top_k(self, topic: str, k: int) -> list:
        return self.rankings.get(topic, [])[:k]


@dataclass(frozen=True)
class Qrels:
    """Graded relevance judgments: topic -> docid -> level in {0, 1, 2}.

    Documents absent from a topic's entries are implicitly level 0 for measure
    computation but remain distinguishable as unjudged for pooling audits.
    """

    version_id: str
    entries: dict  # topic id -> {docid: level}

    def topics(self) -> list:
        return sorted(self.entries)

    def level(self, topic: str, doc: str) -> int:
        return self.entries.get(topic, {}).get(doc, 0)

    def is_judged(self, topic: str, doc: str) -> bool:
        return doc in self.entries.get(topic, {})

    def relevant_count(self, topic: str) -> int:
        return sum(1 for lv in self.entries.get(topic, {}).values() if lv >= 1)

    def size(self) -> int:
        """Total number of judged topicdocs."""
        return sum(len(docs) for docs in self.entries.values())


@dataclass(frozen=True)
class LabelMatrix:
    """Coders x topicdocs grid of levels {0,1,2} or NA.

    ``assessors`` holds the ordered coder ids (human assessor ids for the
    released matrix, qrels version ids for per-topic agreement runs).  Cells
    are stored per unit as a tuple of ints with NA = -1; a cell is present
    exactly when that coder judged that unit.
    """

    units: tuple  # of (topic id, doc id)
    assessors: tuple  # of coder ids
    cells: tuple  # of per-unit tuples, len(assessors) each, values 0/1/2/NA

    def __post_init__(self):
        if len(self.cells) != len(self.units):
            raise DataError("one cell row required per unit")
        for row in self.cells:
            if len(row) != len(self.assessors):
                raise DataError("one cell per coder required per unit")

    def assessor_index(self, assessor_id: str) -> int:
        try:
            return self.assessors.index(assessor_id)
        except ValueError:
            raise DataError(f"unknown assessor {assessor_id!r}") from None

    def column(self, assessor_id: str) -> list:
        j = self.assessor_index(assessor_id)
        return [row[j] for row in self.cells]

    def drop_assessor(self, assessor_id: str) -> "LabelMatrix":
        """Copy with one coder's labels replaced by NA."""
        j = self.assessor_index(assessor_id)
        rows = tuple(row[:j] + (NA,) + row[j + 1:] for row in self.cells)
        return LabelMatrix(units=self.units, assessors=self.assessors, cells=rows)

    def select_assessors(self, keep) -> "LabelMatrix":
        """Copy restricted to the coders in ``keep`` (order preserved)."""
        idx = [j for j, a in enumerate(self.assessors) if a in set(keep)]
        return LabelMatrix(
            units=self.units,
            assessors=tuple(self.assessors[j] for j in idx),
            cells=tuple(tuple(row[j] for j in idx) for row in self.cells),
        )

    def topic_units(self, topic: str) -> list:
        return [i for i, (t, _) in enumerate(self.units) if t == topic]

    def topics(self) -> list:
        return sorted({t for t, _ in self.units})


@dataclass(frozen=True)
class ScoreMatrix:
    """Per-topic measure scores for one (measure, qrels version) pair."""

    measure_id: str
    qrels_version: str
    cutoff: int
    topics: tuple  # ordered topic ids
    runs: tuple  # ordered run tags
    values: tuple  # of per-topic tuples of floats, aligned with runs

    def mean_by_run(self) -> dict:
        """Mean score over topics, per run tag."""
        n = len(self.topics)
        means = {}
        for j, tag in enumerate(self.runs):
            means[tag] = sum(row[j] for row in self.values) / n
        return means

    def column(self, run_tag: str) -> list:
        j = self.runs.index(run_tag)
        return [row[j] for row in self.values]


# ---------------------------------------------------------------------------
# Run files: `qid Q0 docid rank score tag`, whitespace separated, LF endings.

def parse_run_file(path) -> RankedRun:
    """Parse a ranked run file, validating rank contiguity per topic."""
    by_topic = {}
    run_tag = None
    with open(path, encoding="utf-8") as fp:
        for lineno, line in enumerate(fp, 1):
            if not line.strip():
                continue
            parts = line.split()
            if len(parts) != 6:
                raise DataError(f"{path}:{lineno}: expected 6 fields, got {len(parts)}")
            qid, q0, docid, rank_s, score_s, tag = parts
            if q0 != "Q0":
                raise DataError(f"{path}:{lineno}: second field must be 'Q0', got {q0!r}")
            try:
                rank = int(rank_s)
                float(score_s)  # only rank order is authoritative, but it must parse
            except ValueError:
                raise DataError(f"{path}:{lineno}: bad rank or score") from None
            if run_tag is None:
                run_tag = tag
            by_topic.setdefault(qid, []).append((rank, docid))

    rankings = {}
    for qid, pairs in by_topic.items():
        pairs.sort()
        docs = []
        seen = set()
        for i, (rank, docid) in enumerate(pairs, 1):
            if docid in seen:
                raise DataError(f"{path}: duplicate document {docid!r} in topic {qid}")
            if rank != i:
                raise DataError(
                    f"{path}: topic {qid}: ranks not contiguous from 1 (found {rank} at position {i})"
                )
            seen.add(docid)
            docs.append(docid)
        rankings[qid] = docs
    return RankedRun(run_tag=run_tag or "", rankings=rankings)


def serialize_run(run: RankedRun, scores: dict | None = None) -> str:
    """Canonical run file text: topics ascending, ranks ascending.

    ``scores`` optionally maps (topic, doc) to a float; otherwise descending
    integer scores are synthesized so the file round-trips through parsing.
    """
    lines = []
    for qid in sorted(run.rankings):
        docs = run.rankings[qid]
        for i, doc in enumerate(docs, 1):
            score = scores[(qid, doc)] if scores else float(len(docs) - i + 1)
            lines.append(f"{qid} Q0 {doc} {i} {score} {run.run_tag}")
    return "\n".join(lines) + "\n" if lines else ""


# ---------------------------------------------------------------------------
# Qrels files: `qid 0 docid level`; '#' lines are comments.

def parse_qrels_file(path, version_id: str | None = None) -> Qrels:
    entries = {}
    with open(path, encoding="utf-8") as fp:
        for lineno, line in enumerate(fp, 1):
            if not line.strip() or line.startswith("#"):
                continue
            parts = line.split()
            if len(parts) != 4:
                raise DataError(f"{path}:{lineno}: expected 4 fields, got {len(parts)}")
            qid, _zero, docid, level_s = parts
            try:
                level = int(level_s)
            except ValueError:
                raise DataError(f"{path}:{lineno}: bad level {level_s!r}") from None
            if level not in (0, 1, 2):
                raise DataError(f"{path}:{lineno}: level {level} outside {{0,1,2}}")
            topic_entries = entries.setdefault(qid, {})
            if docid in topic_entries:
                raise DataError(f"{path}:{lineno}: duplicate pair ({qid}, {docid})")
            topic_entries[docid] = level
    if version_id is None:
        version_id = str(path)
    return Qrels(version_id=version_id, entries=entries)


def serialize_qrels(qrels: Qrels, header: str | None = None) -> str:
    """Canonical qrels text: topics ascending, docids ascending, single spaces."""
    lines = []
    if header:
        lines.append(f"# {header}")
    for qid in sorted(qrels.entries):
        for docid in sorted(qrels.entries[qid]):
            lines.append(f"{qid} 0 {docid} {qrels.entries[qid][docid]}")
    return "\n".join(lines) + "\n" if lines else ""


# ---------------------------------------------------------------------------
# Topic files: lenient pseudo-XML fragments without a single root element.

_TOPIC_FIELD = re.compile(r"<(qid|content|description)>(.*?)</\1>", re.DOTALL)


def parse_topics_file(path) -> list:
    """Parse topic fragments of the form <topic><qid>..</qid><content>..</content>...</topic>.

    The format is tag soup without a root element, so this scans for field tags
    inside each <topic>...</topic> block rather than using an XML parser.
    """
    text = open(path, encoding="utf-8").read()
    topics = []
    for block in re.findall(r"<topic>(.*?)</topic>", text, re.DOTALL):
        fields = {name: value.strip() for name, value in _TOPIC_FIELD.findall(block)}
        if "qid" not in fields or "content" not in fields:
            raise DataError(f"{path}: topic block missing <qid> or <content>")
        topics.append(Topic(qid=fields["qid"], content=fields["content"],
                            description=fields.get("description", "")))
    return topics


# ---------------------------------------------------------------------------
# Label matrix files: TSV, header = coder ids, first two columns topic and doc,
# cells 0/1/2 or the literal `NA`.  Any row order is accepted.

def parse_label_matrix(path) -> LabelMatrix:
    units, rows = [], []
    with open(path, encoding="utf-8") as fp:
        header = fp.readline().rstrip("\n").split("\t")
        if len(header) < 3 or header[0] != "topic" or header[1] != "doc":
            raise DataError(f"{path}: header must start with 'topic\\tdoc' then coder ids")
        assessors = tuple(header[2:])
        seen = set()
        for lineno, line in enumerate(fp, 2):
            if not line.strip():
                continue
            parts = line.rstrip("\n").split("\t")
            if len(parts) != len(header):
                raise DataError(f"{path}:{lineno}: expected {len(header)} columns, got {len(parts)}")
            unit = (parts[0], parts[1])
            if unit in seen:
                raise DataError(f"{path}:{lineno}: duplicate unit {unit}")
            seen.add(unit)
            cells = []
            for cell in parts[2:]:
                if cell == "NA":
                    cells.append(NA)
                elif cell in ("0", "1", "2"):
                    cells.append(int(cell))
                else:
                    raise DataError(f"{path}:{lineno}: bad cell {cell!r}")
            units.append(unit)
            rows.append(tuple(cells))
    return LabelMatrix(units=tuple(units), assessors=assessors, cells=tuple(rows))


def serialize_label_matrix(matrix: LabelMatrix) -> str:
    lines = ["\t".join(("topic", "doc") + tuple(matrix.assessors))]
    for (topic, doc), row in zip(matrix.units, matrix.cells):
        cells = ["NA" if v == NA else str(v) for v in row]
        lines.append("\t".join((topic, doc) + tuple(cells)))
    return "\n".join(lines) + "\n"


# ---------------------------------------------------------------------------
# Score matrix files: TSV, rows = topics, columns = runs (lexicographic),
# plus a trailing mean row.

def serialize_score_matrix(matrix: ScoreMatrix) -> str:
    lines = ["\t".join(("topic",) + tuple(matrix.runs))]
    for topic, row in zip(matrix.topics, matrix.values):
        lines.append("\t".join((topic,) + tuple(f"{v:.6f}" for v in row)))
    means = matrix.mean_by_run()
    lines.append("\t".join(("mean",) + tuple(f"{means[r]:.6f}" for r in matrix.runs)))
    return "\n".join(lines) + "\n"


def parse_score_matrix(path, measure_id: str = "", qrels_version: str = "",
                       cutoff: int = 0) -> ScoreMatrix:
    with open(path, encoding="utf-8") as fp:
        header = fp.readline().rstrip("\n").split("\t")
        if len(header) < 2 or header[0] != "topic":
            raise DataError(f"{path}: header must be 'topic' then run tags")
        runs = tuple(header[1:])
        topics, values = [], []
        for lineno, line in enumerate(fp, 2):
            if not line.strip():
                continue
            parts = line.rstrip("\n").split("\t")
            if len(parts) != len(header):
                raise DataError(f"{path}:{lineno}: expected {len(header)} columns")
            if parts[0] == "mean":
                continue
            try:
                row = tuple(float(v) for v in parts[1:])
            except ValueError:
                raise DataError(f"{path}:{lineno}: bad score value") from None
            topics.append(parts[0])
            values.append(row)
    return ScoreMatrix(measure_id=measure_id, qrels_version=qrels_version, cutoff=cutoff,
                       topics=tuple(topics), runs=runs, values=tuple(values))


# ---------------------------------------------------------------------------

def assemble_qrels(matrix: LabelMatrix, assessor_id: str) -> Qrels:
    """Qrels from one coder's column: one entry per non-NA cell."""
    j = matrix.assessor_index(assessor_id)
    entries = {}
    for (topic, doc), row in zip(matrix.units, matrix.cells):
        if row[j] != NA:
            entries.setdefault(topic, {})[doc] = row[j]
    return Qrels(version_id=assessor_id, entries=entries)
