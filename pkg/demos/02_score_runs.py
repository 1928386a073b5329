"""
Scoring runs with graded evaluation measures
============================================

Judgments are graded 0 (not relevant), 1 (relevant), 2 (highly relevant)
with gain 2^level - 1.  Four top-weighted measures are computed at a
cutoff: normalised DCG, the cutoff version of Q, normalised expected
reciprocal rank, and a pinned-persistence rank-biased utility.
"""

from poolbench.measures import MEASURES, MeasureConfig, score_matrix
from poolbench.model import Qrels, RankedRun, serialize_score_matrix

qrels = Qrels("demo", {
    "101": {"web01": 2, "web02": 1, "web03": 0, "web04": 1},
    "102": {"web05": 1, "web06": 2, "web07": 0},
})

runs = [
    RankedRun("sys-alpha", {"101": ["web01", "web04", "web03"],
                            "102": ["web06", "web05", "web07"]}),
    RankedRun("sys-beta", {"101": ["web03", "web01", "web02"],
                           "102": ["web07", "web06", "web05"]}),
]

# Score one ranking directly.  Every measure takes the ranked docids, the
# topic's judged entries, and a config carrying the cutoff.
config = MeasureConfig(cutoff=10)
entries = qrels.entries["101"]
for name, fn in MEASURES.items():
    print(f"{name:>5} of sys-alpha on 101: {fn(runs[0].rankings['101'], entries, config):.5f}")

# An ideal reranking of the same pool scores 1 for the normalised measures.
ideal = sorted(entries, key=lambda d: (-entries[d], d))
print("ideal ndcg:", MEASURES["ndcg"](ideal, entries, config))

# The topic x run score matrix is the input to every later comparison.
# Topics with no relevant documents are refused, so build the matrix only
# over valid topics.
matrix = score_matrix(runs, qrels, "ndcg", config)
print(serialize_score_matrix(matrix))
