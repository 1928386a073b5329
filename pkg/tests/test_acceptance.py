"""Acceptance gate: each test reproduces one published analysis at a pinned tolerance.

Every numeric target below is a value printed in the published study this
workbench rebuilds (efficiency tables, rank-agreement tables, power table,
worked agreement examples).  One test per criterion, so the verbose test
report reads as a pass/fail line per criterion.
"""

import itertools
import math
import os
import random
from pathlib import Path

import pytest

from poolbench.agreement import (
    krippendorff_alpha_ordinal,
    leave_one_out_alpha,
    matrix_from_qrels,
    mean_per_topic_alpha,
    quadratic_weighted_kappa,
)
from poolbench.measures import MEASURES, MeasureConfig, score_matrix
from poolbench.model import (
    LabelMatrix,
    Qrels,
    RankedRun,
    parse_label_matrix,
    parse_qrels_file,
    parse_run_file,
)
from poolbench.pooling import PoolConfig, build_ordered_pool, serialize_pool
from poolbench.rankstats import (
    paired_t,
    power_pairedt,
    tau_fisher_ci,
    tukey_p_paired_summary,
    tukey_p_unpaired_summary,
)
from poolbench.robustness import (
    loto_experiment,
    rr_filter,
    unique_contributions,
    valid_topics,
)

from oracles import oracle_alpha_ordinal

# ---------------------------------------------------------------------------
# Criterion: Fisher-z confidence intervals for tau reproduce published bounds.

TAU_CI_CASES = [
    (0.733, 36, 0.608, 0.822),
    (0.944, 36, 0.913, 0.964),
]


def test_tau_confidence_intervals():
    for tau, n, lo, hi in TAU_CI_CASES:
        got_lo, got_hi = tau_fisher_ci(tau, n)
        assert got_lo == pytest.approx(lo, abs=1e-3)
        assert got_hi == pytest.approx(hi, abs=1e-3)


# ---------------------------------------------------------------------------
# Criterion: prospective power analysis reproduces the published power table
# and its companions: required n exactly, achieved power within 0.3pp.

POWER_CASES = [  # (pilot t, pilot n, achieved power %, required n for 70%)
    (2.42, 44, 65.6, 49),
    (3.54, 82, 93.8, 43),
    (4.21, 32, 98.3, 14),
    (4.00, 160, 97.8, 64),
    (3.85, 160, 96.9, 69),
    (4.57, 160, 99.5, 50),
    (0.949, 160, 15.7, 1098),
]


def test_power_table_reproduction():
    for t, n, percent, required in POWER_CASES:
        result = power_pairedt(t, n)
        assert result.required_n_for_target == required, (t, n)
        assert 100.0 * result.achieved_power == pytest.approx(percent, abs=0.3), (t, n)


# ---------------------------------------------------------------------------
# Criterion: every printed effect size is diff/sqrt(V) of the printed mean
# difference and residual variance, to within 0.01.  The leave-one-team-out
# grid prints its means at three decimals, so for those pairs the tolerance is
# widened by the worst-case rounding of the difference, 0.001/sqrt(V).

EFFICIENCY_ES = [  # (mean a, mean b, residual variance, printed ES)
    (206.5, 85.3, 55844.0, 0.513),   # time to first relevant hold
    (206.5, 89.5, 55844.0, 0.495),
    (488.7, 218.1, 89460.0, 0.905),  # time to first hold
    (488.7, 179.2, 89460.0, 1.03),
    (488.7, 190.2, 89460.0, 0.998),
    (488.7, 157.3, 89460.0, 1.11),
    (488.7, 129.9, 89460.0, 1.20),
    (15.8, 13.1, 56.53, 0.361),      # gaps between judgments
    (8.41, 3.99, 107.4, 0.427),      # label-changing re-judgments
    (8.41, 3.82, 107.4, 0.443),
]

GROUP_TAU_ES = [  # strategy-group mean-tau comparisons, one trio per measure
    (0.8922, 0.8418, 0.000826, 1.75),  # ndcg: within-RND vs between
    (0.9170, 0.8418, 0.000826, 2.62),  # ndcg: within-PRI vs between
    (0.9170, 0.8922, 0.000826, 0.86),  # ndcg: within-PRI vs within-RND
    (0.8642, 0.8407, 0.00134, 0.64),
    (0.8802, 0.8407, 0.00134, 1.08),
    (0.8802, 0.8642, 0.00134, 0.44),
    (0.8518, 0.8019, 0.00115, 1.47),
    (0.8975, 0.8019, 0.00115, 2.82),
    (0.8975, 0.8518, 0.00115, 1.35),
    (0.8548, 0.8132, 0.000842, 1.43),
    (0.8802, 0.8132, 0.000842, 2.31),
    (0.8802, 0.8548, 0.000842, 0.87),
]

IN_TEXT_ES = [
    (41.2, 28.1, 1200.5, 0.378),
    (488.7, 129.9, 89460.0, 1.20),
    (0.8975, 0.8518, 0.00115, 1.35),
]

LOTO_TAU_ES = [  # means printed at three decimals
    (0.965, 0.943, 0.000173, 1.73),  # ndcg
    (0.959, 0.932, 0.000181, 1.99),  # q
    (0.959, 0.933, 0.000181, 1.90),
    (0.959, 0.935, 0.000181, 1.74),
    (0.959, 0.937, 0.000181, 1.64),
]


def test_effect_size_reconstruction():
    for mean_a, mean_b, variance, printed in EFFICIENCY_ES + GROUP_TAU_ES + IN_TEXT_ES:
        got = (mean_a - mean_b) / math.sqrt(variance)
        assert got == pytest.approx(printed, abs=0.01), (mean_a, mean_b, printed)
    for mean_a, mean_b, variance, printed in LOTO_TAU_ES:
        got = (mean_a - mean_b) / math.sqrt(variance)
        tolerance = 0.01 + 0.001 / math.sqrt(variance)
        assert got == pytest.approx(printed, abs=tolerance), (mean_a, mean_b, printed)


@pytest.mark.xfail(strict=True, reason="three-decimal rounding of the published "
                   "mean-tau grid alone moves diff/sqrt(V) by up to "
                   "0.001/sqrt(V) ~ 0.076, so 0.01 is unattainable from the "
                   "printed values; the widened bound above is the honest check")
def test_loto_effect_sizes_at_strict_tolerance():
    for mean_a, mean_b, variance, printed in LOTO_TAU_ES:
        got = (mean_a - mean_b) / math.sqrt(variance)
        assert got == pytest.approx(printed, abs=0.01), (mean_a, mean_b, printed)


# ---------------------------------------------------------------------------
# Criterion: Tukey p-values reconstructed from printed table summaries land in
# the published ranges.

def test_tukey_p_reconstruction_from_summaries():
    p_paired = tukey_p_paired_summary(358.8, 89460.0, n=32, k=8)
    assert 4e-5 <= p_paired <= 1.6e-4  # printed as 0.000081
    p_unpaired = tukey_p_unpaired_summary(0.8975 - 0.8518, 0.00115,
                                          n_a=6, n_b=6, k=3, total_n=28)
    assert p_unpaired == pytest.approx(0.070, abs=0.010)


# ---------------------------------------------------------------------------
# Criterion: graded measures match a direct-from-definition evaluator to 1e-12
# on every permutation of every labeled pool of up to five documents, score
# their maximum on the ideal ranking, and never lose from promoting a more
# relevant document one rank (exchange monotonicity; iRBU is flat in grade so
# the exchange check covers ndcg, q, and nerr).

def test_measure_oracle_equivalence_exhaustive():
    from oracles import ORACLES

    docs = ["d0", "d1", "d2", "d3", "d4"]
    cfg = MeasureConfig(cutoff=10)
    for m in range(1, 6):
        for levels in itertools.product((0, 1, 2), repeat=m):
            if not any(levels):
                continue  # pools with no relevant document are refused
            entries = dict(zip(docs[:m], levels))
            scores = {mid: {} for mid in MEASURES}
            for perm in itertools.permutations(docs[:m]):
                ranked = list(perm)
                for mid, fn in MEASURES.items():
                    got = fn(ranked, entries, cfg)
                    assert got == pytest.approx(
                        ORACLES[mid](ranked, entries, cfg), abs=1e-12), (mid, perm, levels)
                    scores[mid][perm] = got
            ideal = tuple(sorted(docs[:m], key=lambda d: (-entries[d], d)))
            for mid in MEASURES:
                assert scores[mid][ideal] == pytest.approx(
                    max(scores[mid].values()), abs=1e-12), (mid, levels)
            for perm, _ in scores["ndcg"].items():
                for i in range(m - 1):
                    if entries[perm[i]] < entries[perm[i + 1]]:
                        swapped = perm[:i] + (perm[i + 1], perm[i]) + perm[i + 2:]
                        for mid in ("ndcg", "q", "nerr"):
                            assert scores[mid][swapped] >= scores[mid][perm] - 1e-12, (
                                mid, perm, i, levels)


# ---------------------------------------------------------------------------
# Criterion: agreement on the worked examples — perfect matrices give alpha 1,
# the three-unit example gives 0.778 against the coincidence-matrix oracle,
# and the quadratic-kappa example gives 0.636.

def test_agreement_worked_values():
    perfect = LabelMatrix(units=(("t1", "a"), ("t1", "b"), ("t2", "c")),
                          assessors=("A", "B", "C"),
                          cells=((0, 0, 0), (2, 2, 2), (1, 1, 1)))
    assert krippendorff_alpha_ordinal(perfect).alpha == 1.0

    worked = LabelMatrix(units=(("t1", "a"), ("t1", "b"), ("t1", "c")),
                         assessors=("A", "B"),
                         cells=((0, 0), (1, 2), (2, 2)))
    result = krippendorff_alpha_ordinal(worked)
    assert result.alpha == pytest.approx(0.778, abs=1e-3)
    assert result.alpha == pytest.approx(
        oracle_alpha_ordinal([(0, 0), (1, 2), (2, 2)]), abs=1e-12)

    kappa = quadratic_weighted_kappa([0, 1, 2, 2], [0, 2, 2, 1])
    assert kappa == pytest.approx(0.636, abs=1e-3)


# ---------------------------------------------------------------------------
# Criterion: pool orderings are deterministic — the priority ordering is
# byte-identical across rebuilds and input permutations; the randomised
# ordering is byte-identical for equal seeds and differs across 100 random
# seed pairs on a 100-document pool.

def test_pooling_determinism():
    rng = random.Random(7)
    docs = [f"doc{i:03d}" for i in range(100)]
    runs = []
    for t in range(10):
        ranking = docs[:]
        rng.shuffle(ranking)
        runs.append(RankedRun(f"run{t}", {"t1": ranking[:40]}))

    pri = PoolConfig(depth=40, strategy="PRI")
    baseline = serialize_pool(build_ordered_pool(runs, "t1", pri))
    assert serialize_pool(build_ordered_pool(runs, "t1", pri)) == baseline
    for _ in range(5):
        shuffled = runs[:]
        rng.shuffle(shuffled)
        assert serialize_pool(build_ordered_pool(shuffled, "t1", pri)) == baseline

    rnd = PoolConfig(depth=40, strategy="RND", seed=123)
    same_seed = serialize_pool(build_ordered_pool(runs, "t1", rnd))
    assert serialize_pool(build_ordered_pool(list(reversed(runs)), "t1", rnd)) == same_seed

    full = [RankedRun("all", {"t1": docs})]
    checked = 0
    while checked < 100:
        seed_a, seed_b = rng.randrange(2 ** 63), rng.randrange(2 ** 63)
        if seed_a == seed_b:
            continue
        order_a = serialize_pool(build_ordered_pool(
            full, "t1", PoolConfig(depth=100, strategy="RND", seed=seed_a)))
        order_b = serialize_pool(build_ordered_pool(
            full, "t1", PoolConfig(depth=100, strategy="RND", seed=seed_b)))
        assert order_a != order_b, (seed_a, seed_b)
        checked += 1


# ---------------------------------------------------------------------------
# Criterion: leave-one-team-out sanity — a team with no unique contributions
# leaves the ranking untouched (tau exactly 1), and so does removing unique
# contributions that were all labeled not-relevant.

def test_loto_sanity_exact_tau():
    runs = [
        RankedRun("x1", {"t1": ["a", "b", "c"]}),
        RankedRun("x2", {"t1": ["a", "d", "b"]}),
        RankedRun("y1", {"t1": ["b", "a", "e"]}),
        RankedRun("z1", {"t1": ["c", "d", "e"]}),  # every doc also pooled by X or Y
        RankedRun("w1", {"t1": ["f", "a", "b"]}),  # f is unique to W and labeled 0
    ]
    teams = {"x1": "X", "x2": "X", "y1": "Y", "z1": "Z", "w1": "W"}
    qrels = Qrels("V", {"t1": {"a": 2, "b": 1, "c": 0, "d": 1, "e": 0, "f": 0}})

    assert unique_contributions(runs, teams, "Z", k=3) == set()
    assert unique_contributions(runs, teams, "W", k=3) == {("t1", "f")}

    report = loto_experiment(runs, qrels, teams, "ndcg",
                             MeasureConfig(cutoff=10), pool_depth=3)
    by_team = {entry.team: entry for entry in report.per_team}
    assert by_team["Z"].unique_contribution_count == 0
    assert by_team["Z"].tau.tau == 1.0
    assert by_team["Z"].loto_qrels_size == qrels.size()
    assert by_team["W"].tau.tau == 1.0
    assert by_team["W"].loto_qrels_size == qrels.size() - 1


# ---------------------------------------------------------------------------
# Optional criterion (requires the released full collection; place it under
# tests/data/www3e8 or point POOLBENCH_WWW3E8_DIR at it):
#
#   assessor-labels.tsv     topic/doc rows, one column per human assessor
#   units-rnd.txt           "topic doc" lines: units pooled under RND versions
#   units-pri.txt           "topic doc" lines: units pooled under PRI versions
#   raw-labels.tsv          "topic doc version label" lines, labels as judged
#   qrels/<VERSION>.txt     eight qrels files, RND1..RND4 and PRI1..PRI4
#   runs/<tag>.txt          the contributing runs
#   teams.txt               "run_tag team" lines

WWW3E8_DIR = Path(os.environ.get("POOLBENCH_WWW3E8_DIR",
                                 Path(__file__).parent / "data" / "www3e8"))

VERSIONS = ["RND1", "RND2", "RND3", "RND4", "PRI1", "PRI2", "PRI3", "PRI4"]


def _unit_subset(matrix, wanted):
    keep = [i for i, unit in enumerate(matrix.units) if unit in wanted]
    return LabelMatrix(units=tuple(matrix.units[i] for i in keep),
                       assessors=matrix.assessors,
                       cells=tuple(matrix.cells[i] for i in keep))


def _read_units(path):
    return {tuple(line.split()) for line in path.read_text().splitlines() if line.strip()}


@pytest.mark.skipif(not WWW3E8_DIR.exists(),
                    reason="released full collection not present")
def test_full_collection_reproduction():
    matrix = parse_label_matrix(WWW3E8_DIR / "assessor-labels.tsv")
    assert krippendorff_alpha_ordinal(matrix).alpha == pytest.approx(0.425, abs=1e-3)
    rnd_units = _read_units(WWW3E8_DIR / "units-rnd.txt")
    pri_units = _read_units(WWW3E8_DIR / "units-pri.txt")
    assert krippendorff_alpha_ordinal(
        _unit_subset(matrix, rnd_units)).alpha == pytest.approx(0.433, abs=1e-3)
    assert krippendorff_alpha_ordinal(
        _unit_subset(matrix, pri_units)).alpha == pytest.approx(0.423, abs=1e-3)
    assert leave_one_out_alpha(matrix, "A01").alpha == pytest.approx(0.425, abs=1e-3)

    totals = {"H.REL": 0, "REL": 0, "NONREL": 0, "ERROR": 0}
    for line in (WWW3E8_DIR / "raw-labels.tsv").read_text().splitlines():
        if line.strip():
            totals[line.split()[3]] += 1
    assert totals == {"H.REL": 28144, "REL": 61512, "NONREL": 163090, "ERROR": 6254}

    versions = [parse_qrels_file(WWW3E8_DIR / "qrels" / f"{v}.txt", version_id=v)
                for v in VERSIONS]
    runs = [parse_run_file(path) for path in sorted((WWW3E8_DIR / "runs").iterdir())]
    teams = dict(line.split() for line in
                 (WWW3E8_DIR / "teams.txt").read_text().splitlines() if line.strip())

    version_matrix = matrix_from_qrels(versions)
    per_topic = {proj: mean_per_topic_alpha(version_matrix, projection=proj)
                 for proj in ("RND", "PRI")}
    assert per_topic["RND"].mean == pytest.approx(0.293, abs=1e-3)
    assert per_topic["PRI"].mean == pytest.approx(0.279, abs=1e-3)
    shared = sorted(set(per_topic["RND"].per_topic) & set(per_topic["PRI"].per_topic))
    t_stat, _, delta = paired_t([per_topic["RND"].per_topic[t] for t in shared],
                                [per_topic["PRI"].per_topic[t] for t in shared])
    assert t_stat == pytest.approx(0.949, abs=1e-2)
    assert delta == pytest.approx(0.0859, abs=1e-3)

    topics = sorted({t for run in runs for t in run.rankings})
    pools = [build_ordered_pool(runs, t, PoolConfig(depth=15, strategy="PRI"))
             for t in topics]
    sizes = [len(pool.documents) for pool in pools]
    assert sum(sizes) == 32375
    assert sum(sizes) / len(sizes) == pytest.approx(202.3, abs=0.05)

    original = parse_qrels_file(WWW3E8_DIR / "qrels" / "original.txt",
                                version_id="original")
    group4 = unique_contributions(runs, teams, "G4", k=15)
    assert len(group4) == 5857
    judged_removed = sum(1 for (t, d) in group4 if original.is_judged(t, d))
    assert original.size() - judged_removed == 23665

    low = [rr_filter(q, runs, 1, 5) for q in versions]
    high = [rr_filter(q, runs, 11, 15) for q in versions]
    kept = valid_topics(low + high)
    assert len(kept) == 137
    for variant, expected in [(low, 11989), (high, 15089)]:
        for filtered in variant:
            restricted = Qrels(filtered.version_id,
                               {t: filtered.entries[t] for t in kept
                                if t in filtered.entries})
            assert restricted.size() == expected

    loto_tau = {}
    for q in versions:
        report = loto_experiment(runs, q, teams, "ndcg", MeasureConfig(cutoff=10),
                                 pool_depth=15)
        loto_tau[q.version_id] = report.mean_tau
    assert loto_tau["RND2"] == pytest.approx(0.943, abs=2e-3)
    assert loto_tau["PRI4"] == pytest.approx(0.965, abs=2e-3)
