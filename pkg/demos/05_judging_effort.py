"""
Judging-effort criteria from activity logs, with significance and power
=======================================================================

Every assessor action is one JSON line: open a topic, view a document,
judge a document.  From one (assessor, topic) timeline the workbench
derives five effort criteria -- time to the first judgment, to the first
relevant/any hold, the average gap between judgments, and the number of
label-changing re-judgments -- and compares judging conditions with a
paired Tukey HSD.  A pilot t statistic then drives a prospective power
analysis: how many topics would the next campaign need?
"""

from poolbench.efficiency import (
    ActivityEvent,
    efficiency_stats,
    efficiency_table,
    event_to_json,
)
from poolbench.rankstats import power_pairedt, tukey_hsd_paired

SECOND = 1000  # event timestamps are in milliseconds


def timeline(assessor, topic, judgments, start=1_700_000_000_000):
    events = [ActivityEvent(start, assessor, topic, "open_topic")]
    for offset, doc, label in judgments:
        events.append(ActivityEvent(start + offset * SECOND, assessor, topic,
                                    "judge", doc=doc, label=label))
    return events


# Two topics judged under two pool orderings.  The priority ordering tends
# to surface relevant documents sooner, so the first H.REL arrives faster.
cells = {
    ("101", "RND1"): timeline("ann", "101", [(35, "d1", "NONREL"), (70, "d2", "REL"),
                                             (160, "d3", "H.REL"), (190, "d2", "NONREL")]),
    ("101", "PRI1"): timeline("ben", "101", [(28, "d3", "H.REL"), (66, "d1", "REL"),
                                             (101, "d2", "NONREL")]),
    ("102", "RND1"): timeline("ben", "102", [(41, "d7", "NONREL"), (99, "d8", "REL"),
                                             (204, "d9", "H.REL")]),
    ("102", "PRI1"): timeline("ann", "102", [(30, "d9", "H.REL"), (75, "d8", "REL"),
                                             (120, "d7", "NONREL")]),
}

# One line of the activity log, as it would sit on disk.
print("a log line:", event_to_json(cells[("101", "RND1")][1]))

stats = {cell: efficiency_stats(events) for cell, events in cells.items()}
for cell, s in sorted(stats.items()):
    print(f"  {cell}: first judgment {s.tj1d:.0f}s, first relevant hold "
          f"{s.tf1rh:.0f}s, re-judgments {s.nrej}")

# Topic x version table for one criterion; topics missing a value in any
# version would be dropped listwise.
versions = ["RND1", "PRI1"]
topics, rows = efficiency_table(stats, "tf1rh", versions)
print("time to first relevant hold:",
      {topic: dict(zip(versions, row)) for topic, row in zip(topics, rows)})

hsd = tukey_hsd_paired(rows, versions)
cmp = hsd.pairwise[0]
print(f"RND1 vs PRI1: diff={cmp.mean_diff:+.1f}s p={cmp.p_value:.3f} "
      f"ES={cmp.effect_size:.2f} (V={hsd.residual_variance:.1f}, n={hsd.n_blocks})")

# Prospective power: a pilot with t=2.42 over 44 topics sits below the
# usual 70% power bar; the search reports the topic count that reaches it.
power = power_pairedt(2.42, 44)
print(f"pilot power {100 * power.achieved_power:.1f}%, "
      f"{power.required_n_for_target} topics needed for 70%")
