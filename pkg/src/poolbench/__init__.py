"""poolbench: build and meta-evaluate pooling-based web-search test collections.

Submodules:

- model: domain types and file parsers/serializers
- pooling: depth-k pools with PRI/RND presentation orders
- measures: graded-relevance measures (nDCG, Q, nERR, iRBU) and score matrices
- agreement: Krippendorff's alpha (ordinal) and quadratic weighted kappa
- rankstats: Kendall tau, Tukey HSD, paired t, power analysis
- robustness: leave-one-team-out, rank-range filters, label histograms
- efficiency: activity logs and judging-efficiency criteria
- service: HTTP judgment-collection service
- cli: command-line entry point
"""

__version__ = "0.1.0"
