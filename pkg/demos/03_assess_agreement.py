"""
Inter-assessor agreement: ordinal alpha and quadratic kappa
===========================================================

When several assessors (or several qrels versions) label the same
topic/document units, chance-corrected agreement says how much of the
consistency is real.  Ordinal Krippendorff's alpha works on any number of
coders with missing cells; quadratic-weighted kappa compares two label
vectors and punishes a 0-vs-2 clash four times as hard as a 1-vs-2 one.
"""

from poolbench.agreement import (
    krippendorff_alpha_ordinal,
    leave_one_out_alpha,
    mean_per_topic_alpha,
    quadratic_weighted_kappa,
)
from poolbench.model import LabelMatrix

# A coders x units grid of levels 0/1/2; NA (-1) marks cells a coder never
# judged.  Units with fewer than two labels cannot express agreement and
# are skipped automatically.
matrix = LabelMatrix(
    units=(("101", "web01"), ("101", "web02"), ("101", "web03"),
           ("102", "web05"), ("102", "web06")),
    assessors=("ann", "ben", "kim"),
    cells=((2, 2, 2),
           (1, 2, 1),
           (0, 0, 1),
           (1, 1, -1),
           (0, 2, 0)),
)

overall = krippendorff_alpha_ordinal(matrix)
print(f"alpha={overall.alpha:.4f}  observed disagreement={overall.D_o:.4f}  "
      f"expected={overall.D_e:.4f}  over {overall.unit_count} units")

# Leave-one-out: how much does each coder move the needle?
for coder in matrix.assessors:
    loo = leave_one_out_alpha(matrix, coder)
    print(f"  without {coder}: alpha={loo.alpha:.4f}")

# Per-topic alpha averages topic-level agreement; degenerate topics (no
# label variation anywhere) count as perfect agreement.
per_topic = mean_per_topic_alpha(matrix)
print("mean per-topic alpha:", round(per_topic.mean, 4), dict(per_topic.per_topic))

# Two-coder kappa on aligned label vectors.
kappa = quadratic_weighted_kappa([0, 1, 2, 2, 0], [0, 2, 2, 1, 0])
print(f"quadratic weighted kappa: {kappa:.4f}")
