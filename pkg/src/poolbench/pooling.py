"""Depth-k pool construction and PRI/RND presentation ordering.

PRI orders pooled documents by pseudorelevance (run count descending, rank sum
ascending, docid ascending).  RND shuffles them with a seeded Fisher-Yates over
a splitmix64 stream so orders are bit-exact across implementations; the
per-topic stream is seeded with ``seed XOR fnv1a64(topic id)`` so one master
seed decorrelates topics.
"""

from __future__ import annotations

from dataclasses import dataclass, replace

from .model import DataError, RankedRun

__all__ = [
    "PoolConfig",
    "PoolEntry",
    "PooledTopic",
    "fnv1a64",
    "SplitMix64",
    "build_pool",
    "order_pri",
    "order_rnd",
    "build_ordered_pool",
    "serialize_pool",
    "parse_pool_file",
]

_MASK64 = (1 << 64) - 1


def fnv1a64(data: bytes) -> int:
    """64-bit FNV-1a hash."""
    h = 0xCBF29CE484222325
    for byte in data:
        h ^= byte
        h = (h * 0x100000001B3) & _MASK64
    return h


class SplitMix64:
    """The splitmix64 generator; emits a deterministic uint64 stream."""

    def __init__(self, seed: int):
        self.state = seed & _MASK64

    def next(self) -> int:
        self.state = (self.state + 0x9E3779B97F4A7C15) & _MASK64
        z = self.state
        z = ((z ^ (z >> 30)) * 0xBF58476D1CE4E5B9) & _MASK64
        z = ((z ^ (z >> 27)) * 0x94D049BB133111EB) & _MASK64
        return z ^ (z >> 31)


@dataclass(frozen=True)
class PoolConfig:
    """Pool depth, ordering strategy, and the RND master seed."""

    depth: int = 15
    strategy: str = "PRI"  # PRI or RND
    seed: int = 0

    def __post_init__(self):
        if self.depth < 1:
            raise DataError("pool depth must be >= 1")
        if self.strategy not in ("PRI", "RND"):
            raise DataError(f"unknown strategy {self.strategy!r}")


@dataclass(frozen=True)
class PoolEntry:
    """One pooled document with its pooling statistics."""

    doc: str
    run_count: int  # number of runs containing it at rank <= k
    rank_sum: int  # sum of its ranks over those runs


@dataclass(frozen=True)
class PooledTopic:
    """The depth-k pool for one topic, optionally with a presentation order."""

    topic: str
    documents: tuple  # of PoolEntry
    presentation_order: tuple = ()  # of docids; empty until ordered

    def doc_set(self) -> set:
        return {e.doc for e in self.documents}

    def stats(self) -> dict:
        return {e.doc: (e.run_count, e.rank_sum) for e in self.documents}


def build_pool(runs: list, topic: str, k: int) -> PooledTopic:
    """Union of each run's top-k documents with run counts and rank sums."""
    if k < 1:
        raise DataError("pool depth must be >= 1")
    counts, sums = {}, {}
    covered = False
    for run in runs:
        ranked = run.rankings.get(topic)
        if not ranked:
            continue
        covered = True
        for rank, doc in enumerate(ranked[:k], 1):
            counts[doc] = counts.get(doc, 0) + 1
            sums[doc] = sums.get(doc, 0) + rank
    if not covered:
        raise DataError(f"no run covers topic {topic!r}")
    documents = tuple(PoolEntry(doc, counts[doc], sums[doc]) for doc in sorted(counts))
    return PooledTopic(topic=topic, documents=documents)


def order_pri(pool: PooledTopic) -> tuple:
    """Pseudorelevance order: run count desc, rank sum asc, docid asc."""
    entries = sorted(pool.documents, key=lambda e: (-e.run_count, e.rank_sum, e.doc))
    return tuple(e.doc for e in entries)


def order_rnd(pool: PooledTopic, seed: int) -> tuple:
    """Seeded Fisher-Yates shuffle of the docid-sorted pool; bit-exact."""
    docs = sorted(e.doc for e in pool.documents)
    rng = SplitMix64(seed ^ fnv1a64(pool.topic.encode("utf-8")))
    for i in range(len(docs) - 1, 0, -1):
        j = rng.next() % (i + 1)
        docs[i], docs[j] = docs[j], docs[i]
    return tuple(docs)


def build_ordered_pool(runs: list, topic: str, config: PoolConfig) -> PooledTopic:
    pool = build_pool(runs, topic, config.depth)
    if config.strategy == "PRI":
        order = order_pri(pool)
    else:
        order = order_rnd(pool, config.seed)
    return replace(pool, presentation_order=order)


# ---------------------------------------------------------------------------
# Pool files: one line per document, `qid docid run_count rank_sum position`,
# emitted in presentation order.

def serialize_pool(pool: PooledTopic) -> str:
    if not pool.presentation_order:
        raise DataError(f"pool for topic {pool.topic} has no presentation order")
    stats = pool.stats()
    lines = []
    for pos, doc in enumerate(pool.presentation_order, 1):
        run_count, rank_sum = stats[doc]
        lines.append(f"{pool.topic} {doc} {run_count} {rank_sum} {pos}")
    return "\n".join(lines) + "\n"


def parse_pool_file(path) -> list:
    """Parse a pool file into PooledTopic objects (one per topic)."""
    per_topic = {}
    with open(path, encoding="utf-8") as fp:
        for lineno, line in enumerate(fp, 1):
            if not line.strip() or line.startswith("#"):
                continue
            parts = line.split()
            if len(parts) != 5:
                raise DataError(f"{path}:{lineno}: expected 5 fields, got {len(parts)}")
            qid, doc, run_count, rank_sum, position = parts
            try:
                entry = (int(position), PoolEntry(doc, int(run_count), int(rank_sum)))
            except ValueError:
                raise DataError(f"{path}:{lineno}: bad integer field") from None
            per_topic.setdefault(qid, []).append(entry)
    pools = []
    for qid, entries in sorted(per_topic.items()):
        entries.sort(key=lambda pair: pair[0])
        positions = [pos for pos, _ in entries]
        if positions != list(range(1, len(entries) + 1)):
            raise DataError(f"{path}: topic {qid}: positions not contiguous from 1")
        docs = tuple(e for _, e in entries)
        order = tuple(e.doc for _, e in entries)
        pools.append(PooledTopic(topic=qid, documents=tuple(sorted(docs, key=lambda e: e.doc)),
                                 presentation_order=order))
    return pools
