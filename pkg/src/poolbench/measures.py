"""Graded-relevance evaluation measures at a measurement cutoff.

All four measures (nDCG, cutoff Q-measure, nERR, iRBU) use the exponential
gain mapping 2^level - 1 and depend only on the levels of the ranked documents
plus the topic's level multiset (for ideal rankings), never on docids.
Topics without a single relevant document are refused rather than scored 0,
so callers must exclude them first.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

from .model import DataError, Qrels, RankedRun, ScoreMatrix

__all__ = [
    "MeasureConfig",
    "UndefinedMeasureError",
    "MEASURES",
    "gain_of",
    "ndcg_at",
    "q_at",
    "nerr_at",
    "irbu_at",
    "score_matrix",
]


class UndefinedMeasureError(DataError):
    """The measure is undefined for this topic (no relevant documents)."""


@dataclass(frozen=True)
class MeasureConfig:
    """Measurement cutoff l, maximum level H, RBP persistence p, Q-measure beta."""

    cutoff: int = 10
    max_level: int = 2
    persistence: float = 0.99
    beta: float = 1.0

    def __post_init__(self):
        if self.cutoff < 1:
            raise DataError("cutoff must be >= 1")
        if self.max_level < 1:
            raise DataError("max level must be >= 1")
        if not 0.0 < self.persistence < 1.0:
            raise DataError("persistence must be in (0, 1)")
        if self.beta < 0.0:
            raise DataError("beta must be nonnegative")


def gain_of(level: int, max_level: int = 2) -> int:
    """Exponential gain: 2^level - 1."""
    if not 0 <= level <= max_level:
        raise DataError(f"level {level} outside 0..{max_level}")
    return (1 << level) - 1


def _ranked_levels(ranked: list, entries: dict, config: MeasureConfig) -> list:
    """Levels of the top-l ranked documents (unjudged documents gain level 0)."""
    if not ranked:
        raise DataError("ranked list is empty")
    return [entries.get(doc, 0) for doc in ranked[: config.cutoff]]


def _ideal_levels(entries: dict, config: MeasureConfig) -> list:
    """Topic's level multiset sorted descending (the ideal ranking's levels)."""
    levels = sorted(entries.values(), reverse=True)
    if not levels or levels[0] < 1:
        raise UndefinedMeasureError("topic has no relevant documents")
    return levels


def ndcg_at(ranked: list, entries: dict, config: MeasureConfig = MeasureConfig()) -> float:
    """Microsoft-version normalised DCG: DCG@l = sum gain(r) / log2(r+1)."""
    ideal = _ideal_levels(entries, config)
    levels = _ranked_levels(ranked, entries, config)

    def dcg(levs):
        return sum(gain_of(lv, config.max_level) / math.log2(r + 1)
                   for r, lv in enumerate(levs, 1))

    return dcg(levels) / dcg(ideal[: config.cutoff])


def q_at(ranked: list, entries: dict, config: MeasureConfig = MeasureConfig()) -> float:
    """Cutoff Q-measure: mean blended ratio over relevant ranks in the top l.

    Q@l = (1/min(l,R)) * sum_{r<=l} J(r) * BR(r) with
    BR(r) = (C(r) + beta*cg(r)) / (r + beta*cg*(r)).
    """
    ideal = _ideal_levels(entries, config)
    levels = _ranked_levels(ranked, entries, config)
    R = sum(1 for lv in ideal if lv >= 1)

    total = 0.0
    relevant_seen = 0  # C(r)
    cg = 0.0  # cumulative gain of the actual ranking
    cg_ideal = 0.0  # cumulative gain of the ideal ranking
    for r, lv in enumerate(levels, 1):
        cg += gain_of(lv, config.max_level)
        if r <= len(ideal):
            cg_ideal += gain_of(ideal[r - 1], config.max_level)
        if lv >= 1:
            relevant_seen += 1
            total += (relevant_seen + config.beta * cg) / (r + config.beta * cg_ideal)
    return total / min(config.cutoff, R)


def nerr_at(ranked: list, entries: dict, config: MeasureConfig = MeasureConfig()) -> float:
    """Normalised Expected Reciprocal Rank with stop probability gain(r) / 2^H.

    The ideal ERR in the denominator is also cut at the measurement depth l.
    """
    ideal = _ideal_levels(entries, config)
    levels = _ranked_levels(ranked, entries, config)

    def err(levs):
        total, continue_p = 0.0, 1.0
        for r, lv in enumerate(levs, 1):
            stop = gain_of(lv, config.max_level) / (1 << config.max_level)
            total += continue_p * stop / r
            continue_p *= 1.0 - stop
        return total

    return err(levels) / err(ideal[: config.cutoff])


def irbu_at(ranked: list, entries: dict, config: MeasureConfig = MeasureConfig()) -> float:
    """Binarised rank-biased utility: (1-p) * sum_{r<=l} p^(r-1) * J(r)."""
    _ideal_levels(entries, config)  # refuse zero-relevant topics like the others
    levels = _ranked_levels(ranked, entries, config)
    p = config.persistence
    return (1.0 - p) * sum(p ** (r - 1) for r, lv in enumerate(levels, 1) if lv >= 1)


MEASURES = {"ndcg": ndcg_at, "q": q_at, "nerr": nerr_at, "irbu": irbu_at}


def score_matrix(runs: list, qrels: Qrels, measure_id: str,
                 config: MeasureConfig = MeasureConfig(),
                 topic_filter: list | None = None) -> ScoreMatrix:
    """Topic-by-run score matrix; runs are columns in run-tag lexicographic order.

    ``topic_filter`` must exclude zero-relevant topics; measure errors on a
    topic propagate as hard errors rather than silently scoring 0.
    """
    if measure_id not in MEASURES:
        raise DataError(f"unknown measure {measure_id!r}; expected one of {sorted(MEASURES)}")
    measure = MEASURES[measure_id]
    if topic_filter is None:
        topics = qrels.topics()
    else:
        topics = sorted(topic_filter)
    if not topics:
        raise DataError("no topics to evaluate")
    ordered_runs = sorted(runs, key=lambda r: r.run_tag)
    values = []
    for topic in topics:
        entries = qrels.entries.get(topic, {})
        row = []
        for run in ordered_runs:
            ranked = run.rankings.get(topic)
            if not ranked:
                raise DataError(f"run {run.run_tag!r} has no ranking for topic {topic}")
            row.append(measure(ranked, entries, config))
        values.append(tuple(row))
    return ScoreMatrix(
        measure_id=measure_id,
        qrels_version=qrels.version_id,
        cutoff=config.cutoff,
        topics=tuple(topics),
        runs=tuple(r.run_tag for r in ordered_runs),
        values=tuple(values),
    )
