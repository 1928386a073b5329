"""
Building depth-k pools with priority and randomised orderings
=============================================================

Several retrieval runs rank documents for the same topic; the pool is the
union of their top-k documents.  The judging order of that pool is either
PRI (documents backed by more runs and better ranks first) or RND (a
seeded, topic-keyed shuffle so every assessor sees an uncorrelated order).
"""

import random

from poolbench.model import RankedRun
from poolbench.pooling import PoolConfig, build_ordered_pool, serialize_pool

# Three runs over one topic.  Rankings share some documents and disagree
# about others, which is what makes pooling interesting.
runs = [
    RankedRun("sys-alpha", {"101": ["web04", "web01", "web07", "web02"]}),
    RankedRun("sys-beta", {"101": ["web01", "web04", "web03", "web09"]}),
    RankedRun("sys-gamma", {"101": ["web02", "web04", "web01", "web05"]}),
]

# Pool the top 3 of every run and order by priority: documents returned by
# more runs come first; ties break on the sum of ranks, then on the docid.
pri = build_ordered_pool(runs, "101", PoolConfig(depth=3, strategy="PRI"))
stats = pri.stats()
print("priority order for topic 101")
for doc in pri.presentation_order:
    run_count, rank_sum = stats[doc]
    print(f"  {doc}  in {run_count} runs, rank sum {rank_sum}")

# The serialised form is byte-stable: permuting the input runs cannot
# change it, which makes pool files safe to diff and cache.
shuffled = runs[:]
random.Random(0).shuffle(shuffled)
assert serialize_pool(build_ordered_pool(shuffled, "101", PoolConfig(depth=3, strategy="PRI"))) \
    == serialize_pool(pri)
print("priority order is independent of input order")

# The randomised ordering draws from a generator seeded with the master
# seed XOR a hash of the topic id: equal seeds reproduce the same order,
# different topics get different orders.
for seed in (7, 7, 8):
    rnd = build_ordered_pool(runs, "101", PoolConfig(depth=3, strategy="RND", seed=seed))
    print(f"seed {seed}: {' '.join(rnd.presentation_order)}")
