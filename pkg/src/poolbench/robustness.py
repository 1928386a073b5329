"""Robustness experiments: leave-one-team-out reusability, rank-range qrels
filtering, zero-relevant topic exclusion, and rank-position label histograms.

LOTO removes a team's unique pool contributions from the qrels entirely (they
become unjudged and thus gain 0) and measures how much the system ranking
moves; rr filters keep only labels for documents some run placed in a given
rank window.
"""

from __future__ import annotations

from dataclasses import dataclass

from .measures import MeasureConfig, score_matrix
from .model import DataError, Qrels
from .pooling import build_pool
from .rankstats import TauResult, kendall_tau

__all__ = [
    "TeamLoto",
    "LotoReport",
    "unique_contributions",
    "loto_qrels",
    "loto_experiment",
    "rr_filter",
    "valid_topics",
    "rank_label_histogram",
]


@dataclass(frozen=True)
class TeamLoto:
    team: str
    unique_contribution_count: int
    loto_qrels_size: int
    tau: TauResult


@dataclass(frozen=True)
class LotoReport:
    measure_id: str
    qrels_version: str
    per_team: tuple  # of TeamLoto, team ids ascending
    mean_tau: float
    score_pairs: tuple  # of (run_tag, full_mean, loto_mean, team_left_out)


def _check_team_map(runs: list, team_map: dict) -> None:
    unmapped = [r.run_tag for r in runs if r.run_tag not in team_map]
    if unmapped:
        raise DataError(f"runs without a team mapping: {unmapped}")


def unique_contributions(runs: list, team_map: dict, team: str, k: int,
                         topics: list | None = None) -> set:
    """Pooled topicdocs whose contributing runs all belong to one team."""
    _check_team_map(runs, team_map)
    team_runs = [r for r in runs if team_map[r.run_tag] == team]
    if not team_runs:
        raise DataError(f"team {team!r} has no runs")
    if topics is None:
        topics = sorted({t for r in runs for t in r.rankings})
    unique = set()
    for topic in topics:
        contributors = {}
        for run in runs:
            for doc in run.top_k(topic, k):
                contributors.setdefault(doc, set()).add(team_map[run.run_tag])
        for doc, teams in contributors.items():
            if teams == {team}:
                unique.add((topic, doc))
    return unique


def loto_qrels(qrels: Qrels, removed: set, version_id: str | None = None) -> Qrels:
    """Copy of the qrels with the given topicdocs removed entirely."""
    entries = {}
    for topic, docs in qrels.entries.items():
        kept = {doc: lv for doc, lv in docs.items() if (topic, doc) not in removed}
        if kept:
            entries[topic] = kept
    return Qrels(version_id=version_id or f"{qrels.version_id}-loto", entries=entries)


def loto_experiment(runs: list, qrels: Qrels, team_map: dict, measure_id: str,
                    config: MeasureConfig = MeasureConfig(),
                    topic_filter: list | None = None,
                    pool_depth: int = 15,
                    eval_run_tags: list | None = None) -> LotoReport:
    """Leave-one-team-out reusability: tau between full and LOTO rankings.

    Pools (for unique contributions) are built from all of ``runs``; the
    ranking itself is computed over ``eval_run_tags`` if given, else over all
    runs.  ``topic_filter`` must leave at least one relevant document in every
    LOTO variant (use valid_topics to construct it).
    """
    _check_team_map(runs, team_map)
    eval_runs = runs if eval_run_tags is None else [
        r for r in runs if r.run_tag in set(eval_run_tags)]
    if not eval_runs:
        raise DataError("no runs to evaluate")
    full = score_matrix(eval_runs, qrels, measure_id, config, topic_filter)
    full_means = full.mean_by_run()
    teams = sorted(set(team_map[r.run_tag] for r in runs))
    per_team, taus, pairs = [], [], []
    for team in teams:
        unique = unique_contributions(runs, team_map, team, pool_depth, topic_filter)
        reduced = loto_qrels(qrels, unique)
        loto = score_matrix(eval_runs, reduced, measure_id, config, topic_filter)
        loto_means = loto.mean_by_run()
        tau = kendall_tau(full_means, loto_means)
        removed_judged = sum(1 for (topic, doc) in unique if qrels.is_judged(topic, doc))
        per_team.append(TeamLoto(team=team, unique_contribution_count=len(unique),
                                 loto_qrels_size=qrels.size() - removed_judged, tau=tau))
        taus.append(tau.tau)
        for tag in sorted(full_means):
            pairs.append((tag, full_means[tag], loto_means[tag], team))
    return LotoReport(measure_id=measure_id, qrels_version=qrels.version_id,
                      per_team=tuple(per_team), mean_tau=sum(taus) / len(taus),
                      score_pairs=tuple(pairs))


def rr_filter(qrels: Qrels, runs: list, lo: int, hi: int,
              version_id: str | None = None) -> Qrels:
    """Keep a qrels entry iff some run ranks that document within [lo, hi]."""
    if not 1 <= lo <= hi:
        raise DataError("need 1 <= lo <= hi")
    in_window = {}
    for run in runs:
        for topic, ranked in run.rankings.items():
            window = in_window.setdefault(topic, set())
            window.update(ranked[lo - 1: hi])
    entries = {}
    for topic, docs in qrels.entries.items():
        window = in_window.get(topic, set())
        kept = {doc: lv for doc, lv in docs.items() if doc in window}
        if kept:
            entries[topic] = kept
    return Qrels(version_id=version_id or f"{qrels.version_id}-rr{lo}-{hi}",
                 entries=entries)


def valid_topics(variants: list) -> list:
    """Topics having at least one relevant document in every supplied variant."""
    if not variants:
        raise DataError("at least one qrels variant required")
    universe = sorted({t for q in variants for t in q.entries})
    kept = [t for t in universe if all(q.relevant_count(t) >= 1 for q in variants)]
    if not kept:
        raise DataError("no topic has relevant documents in every variant")
    return kept


def rank_label_histogram(version_qrels: dict, orders: dict, max_rank: int,
                         versions: list | None = None) -> list:
    """Per-rank counts of relevant-or-higher labels over topics and versions.

    ``version_qrels`` maps version id -> Qrels; ``orders`` maps
    (topic, version id) -> presentation order (docid sequence).  The count at
    rank r sums J(level >= 1) of the document presented at position r over
    every (topic, version) with the version in scope, so the per-rank ceiling
    is (number of versions) x (number of topics).
    """
    if versions is None:
        versions = sorted(version_qrels)
    in_scope = [(topic, version) for (topic, version) in orders if version in set(versions)]
    if not in_scope:
        raise DataError("no presentation orders match the requested versions")
    min_pool = min(len(orders[key]) for key in in_scope)
    if max_rank > min_pool:
        raise DataError(f"max_rank {max_rank} exceeds the minimum pool size {min_pool}")
    counts = [0] * max_rank
    for topic, version in in_scope:
        qrels = version_qrels.get(version)
        if qrels is None:
            raise DataError(f"no qrels supplied for version {version!r}")
        order = orders[(topic, version)]
        for r in range(max_rank):
            if qrels.level(topic, order[r]) >= 1:
                counts[r] += 1
    return counts
