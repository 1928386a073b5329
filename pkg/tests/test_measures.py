"""Graded measures at a cutoff: worked examples, oracle equivalence, bounds."""

import math

import pytest
from hypothesis import given, settings, strategies as st

from oracles import ORACLES
from poolbench.measures import (
    MEASURES,
    MeasureConfig,
    UndefinedMeasureError,
    gain_of,
    irbu_at,
    ndcg_at,
    nerr_at,
    q_at,
    score_matrix,
)
from poolbench.model import DataError, Qrels, RankedRun

CFG = MeasureConfig()

# qrels with one top-grade and one mid-grade doc; run retrieves levels [2,0,1]
ENTRIES = {"dA": 2, "dB": 0, "dC": 1}
RANKED = ["dA", "dB", "dC"]


def test_gain_mapping():
    assert [gain_of(v) for v in (0, 1, 2)] == [0, 1, 3]
    with pytest.raises(DataError):
        gain_of(3, max_level=2)


def test_config_validation():
    with pytest.raises(DataError):
        MeasureConfig(persistence=1.0)
    with pytest.raises(DataError):
        MeasureConfig(cutoff=0)
    with pytest.raises(DataError):
        MeasureConfig(beta=-0.5)


def test_ndcg_worked_example():
    # DCG = 3/1 + 0 + 1/2 = 3.5; iDCG = 3 + 1/log2(3)
    want = 3.5 / (3.0 + 1.0 / math.log2(3.0))
    assert ndcg_at(RANKED, ENTRIES, CFG) == pytest.approx(want, abs=1e-12)
    assert round(want, 5) == 0.96394


def test_q_worked_example():
    # (1/2)(1 + 6/7)
    assert q_at(RANKED, ENTRIES, CFG) == pytest.approx(13.0 / 14.0, abs=1e-12)


def test_nerr_worked_example():
    want = (0.75 + 0.25 * 0.25 / 3.0) / (0.75 + 0.25 * 0.25 / 2.0)
    assert nerr_at(RANKED, ENTRIES, CFG) == pytest.approx(want, abs=1e-12)
    assert round(want, 4) == 0.9867


def test_irbu_worked_example():
    got = irbu_at(RANKED, ENTRIES, CFG)
    assert got == pytest.approx(0.01 * (1.0 + 0.99**2), abs=1e-12)
    assert got == pytest.approx(0.019801, abs=1e-9)


def test_ideal_ranking_scores_one():
    entries = {"a": 2, "b": 1, "c": 0}
    ranked = ["a", "b", "c"]
    for fn in (ndcg_at, q_at, nerr_at):
        assert fn(ranked, entries, CFG) == pytest.approx(1.0, abs=1e-12)


def test_no_relevant_retrieved_scores_zero():
    entries = {"a": 1, "x": 0}
    assert ndcg_at(["x", "y"], entries, CFG) == 0.0
    assert q_at(["x", "y"], entries, CFG) == 0.0
    assert nerr_at(["x", "y"], entries, CFG) == 0.0
    assert irbu_at(["x", "y"], entries, CFG) == 0.0


def test_irbu_saturates_at_geometric_sum():
    cfg = MeasureConfig(cutoff=4)
    entries = {f"d{i}": 1 for i in range(4)}
    got = irbu_at([f"d{i}" for i in range(4)], entries, cfg)
    assert got == pytest.approx(1.0 - 0.99**4, abs=1e-12)


def test_zero_relevant_topic_is_refused():
    entries = {"a": 0, "b": 0}
    for fn in (ndcg_at, q_at, nerr_at, irbu_at):
        with pytest.raises(UndefinedMeasureError):
            fn(["a", "b"], entries, CFG)


def test_unjudged_documents_count_as_nonrelevant():
    entries = {"a": 2}
    with_unjudged = ndcg_at(["zz", "a"], entries, CFG)
    with_judged_zero = ndcg_at(["zz", "a"], {"a": 2, "zz": 0}, CFG)
    assert with_unjudged == with_judged_zero


def test_cutoff_truncates():
    cfg = MeasureConfig(cutoff=1)
    entries = {"a": 1, "b": 2}
    # only rank 1 is seen: gain 1; ideal at cutoff 1 = gain 3
    assert ndcg_at(["a", "b"], entries, cfg) == pytest.approx(1.0 / 3.0, abs=1e-12)


# -- property: implementation == independent evaluator ------------------------

level_lists = st.lists(st.integers(min_value=0, max_value=2), min_size=1, max_size=8)


@given(level_lists, st.integers(min_value=1, max_value=12))
@settings(max_examples=200)
def test_matches_direct_evaluator(levels, cutoff):
    if not any(levels):
        return
    entries = {f"d{i}": lv for i, lv in enumerate(levels)}
    ranked = [f"d{i}" for i in range(len(levels))]
    cfg = MeasureConfig(cutoff=cutoff)
    fns = {"ndcg": ndcg_at, "q": q_at, "nerr": nerr_at, "irbu": irbu_at}
    for mid in MEASURES:
        got = fns[mid](ranked, entries, cfg)
        want = ORACLES[mid](ranked, entries, cfg)
        assert got == pytest.approx(want, abs=1e-12), mid
        assert 0.0 <= got <= 1.0 + 1e-12


@given(level_lists)
@settings(max_examples=120)
def test_exchange_monotonicity(levels):
    """Swapping a better doc above a worse one never lowers rank-greedy scores."""
    if not any(levels):
        return
    entries = {f"d{i}": lv for i, lv in enumerate(levels)}
    ranked = [f"d{i}" for i in range(len(levels))]
    cfg = MeasureConfig(cutoff=len(levels))
    for i in range(len(ranked) - 1):
        hi, lo = ranked[i], ranked[i + 1]
        if entries[hi] < entries[lo]:
            improved = list(ranked)
            improved[i], improved[i + 1] = lo, hi
            for fn in (ndcg_at, q_at, nerr_at):
                assert fn(improved, entries, cfg) >= fn(ranked, entries, cfg) - 1e-12


# -- score matrix --------------------------------------------------------------

def _runs():
    return [
        RankedRun("b-run", {"t1": ["a", "x"], "t2": ["a"]}),
        RankedRun("a-run", {"t1": ["x", "a"], "t2": ["a"]}),
    ]


def _qrels():
    return Qrels("V1", {"t1": {"a": 2, "x": 0}, "t2": {"a": 1}})


def test_score_matrix_shape_and_run_order():
    m = score_matrix(_runs(), _qrels(), "ndcg", CFG, ["t1", "t2"])
    assert m.runs == ("a-run", "b-run")  # lexicographic
    assert m.topics == ("t1", "t2")
    assert m.values[0][1] == pytest.approx(1.0)  # b-run perfect on t1
    assert m.measure_id == "ndcg"
    assert m.qrels_version == "V1"


def test_score_matrix_missing_topic_in_run_is_an_error():
    runs = [RankedRun("r", {"t1": ["a"]})]
    with pytest.raises(DataError, match="t2"):
        score_matrix(runs, _qrels(), "ndcg", CFG, ["t1", "t2"])


def test_score_matrix_rejects_zero_relevant_topic():
    qrels = Qrels("V1", {"t1": {"a": 0}})
    with pytest.raises(UndefinedMeasureError):
        score_matrix([RankedRun("r", {"t1": ["a"]})], qrels, "q", CFG, ["t1"])


def test_score_matrix_unknown_measure():
    with pytest.raises(DataError, match="measure"):
        score_matrix(_runs(), _qrels(), "map", CFG, ["t1"])
