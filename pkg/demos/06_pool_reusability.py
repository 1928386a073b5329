"""
Is the collection reusable?  Leave-one-team-out and rank-range filtering
========================================================================

A pooled collection is reusable if a run that never contributed to the
pool is still ranked fairly.  The leave-one-team-out experiment removes
each team's unique pool contributions from the qrels and checks how much
the system ranking moves (tau close to 1 = robust).  Rank-range filtering
builds reduced qrels from slices of the judging order, which shows how
much of the signal lives in the early ranks.
"""

from poolbench.measures import MeasureConfig
from poolbench.model import Qrels, RankedRun
from poolbench.robustness import (
    loto_experiment,
    rank_label_histogram,
    rr_filter,
    unique_contributions,
)

# Three teams over four topics.  On topics 103/104 everyone retrieved the
# same documents (no unique contributions); topics 101/102 are where the
# teams searched differently.
runs = [
    RankedRun("apple-1", {"101": ["w1", "w2", "w3", "w4"], "102": ["v1", "v2", "v3", "v4"],
                          "103": ["u4", "u3", "u2", "u1"], "104": ["s4", "s3", "s2", "s1"]}),
    RankedRun("apple-2", {"101": ["w2", "w1", "w5", "w3"], "102": ["v2", "v1", "v5", "v3"],
                          "103": ["u3", "u2", "u1", "u4"], "104": ["s3", "s2", "s1", "s4"]}),
    RankedRun("berry-1", {"101": ["w1", "w6", "w2", "w7"], "102": ["v1", "v6", "v2", "v7"],
                          "103": ["u2", "u1", "u3", "u4"], "104": ["s2", "s1", "s3", "s4"]}),
    RankedRun("cedar-1", {"101": ["w8", "w1", "w2", "w6"], "102": ["v8", "v1", "v2", "v6"],
                          "103": ["u1", "u2", "u3", "u4"], "104": ["s1", "s2", "s3", "s4"]}),
]
teams = {"apple-1": "apple", "apple-2": "apple", "berry-1": "berry", "cedar-1": "cedar"}

# apple's unique documents all turned out non-relevant, berry found one
# moderately relevant document nobody else saw, and cedar's w8 is a
# highly relevant document only cedar retrieved.
qrels = Qrels("demo", {
    "101": {"w1": 2, "w2": 1, "w3": 0, "w4": 0, "w5": 0, "w6": 1, "w7": 0, "w8": 2},
    "102": {"v1": 1, "v2": 2, "v3": 0, "v4": 0, "v5": 0, "v6": 0, "v7": 1, "v8": 0},
    "103": {"u1": 2, "u2": 1, "u3": 0, "u4": 0},
    "104": {"s1": 2, "s2": 1, "s3": 0, "s4": 0},
})

for team in ("apple", "berry", "cedar"):
    unique = unique_contributions(runs, teams, team, k=4)
    print(f"{team} uniquely contributed {sorted(doc for _, doc in unique)}")

# Score all runs with the full qrels and with each team's contributions
# removed; tau compares the two leaderboards.
report = loto_experiment(runs, qrels, teams, "ndcg", MeasureConfig(cutoff=10),
                         pool_depth=4)
for entry in report.per_team:
    print(f"  without {entry.team}: qrels {qrels.size()} -> {entry.loto_qrels_size}, "
          f"tau={entry.tau.tau:.3f}")
print(f"mean leave-one-team-out tau: {report.mean_tau:.3f}")

# Rank-range filtering: keep only judgments for documents some run placed
# at ranks 1..2 -- the head of the pool carries most relevant documents.
head = rr_filter(qrels, runs, 1, 2)
print(f"rank 1-2 slice keeps {head.size()} of {qrels.size()} judgments "
      f"(version {head.version_id})")

# Where do the relevant labels sit in a judging order?  The histogram
# counts relevant labels per presentation rank, here over the first 4.
orders = {("101", "demo"): ("w1", "w2", "w8", "w6", "w4", "w3", "w5", "w7"),
          ("102", "demo"): ("v2", "v1", "v3", "v7", "v4", "v5", "v6", "v8")}
counts = rank_label_histogram({"demo": qrels}, orders, max_rank=4)
for rank, count in enumerate(counts, 1):
    print(f"  rank {rank}: {count} relevant labels")
