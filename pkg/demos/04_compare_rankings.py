"""
Comparing system rankings: tau, confidence intervals, and Tukey HSD
===================================================================

Two qrels versions are interchangeable to the extent that they rank the
same systems the same way.  Kendall's tau-a quantifies that, a Fisher-z
interval brackets it, and one-way Tukey HSD with effect sizes says whether
groups of tau values (here: versions judged in randomised order vs in
priority order) differ more than residual noise explains.
"""

from poolbench.rankstats import (
    kendall_tau,
    mean_tau_partition,
    pairwise_tau,
    tukey_hsd_unpaired,
)

# Mean scores per system under six qrels versions: three judged with
# randomised pool order (RND*) and three with priority order (PRI*).
systems = ["sys-%s" % c for c in "abcdefghi"]
base = [0.61, 0.58, 0.49, 0.44, 0.40, 0.32, 0.28, 0.22, 0.18]
wiggle = {
    "RND1": [0.00, 0.00, 0.00, 0.00, 0.00, 0.00, 0.00, 0.00, 0.00],
    "RND2": [0.02, -0.04, 0.02, -0.05, 0.02, -0.02, 0.01, 0.02, -0.01],
    "RND3": [-0.03, 0.02, -0.04, 0.03, -0.01, 0.03, -0.02, 0.00, 0.02],
    "PRI1": [0.01, -0.01, 0.02, -0.02, 0.01, 0.00, 0.01, -0.01, 0.00],
    "PRI2": [0.00, 0.01, -0.01, 0.01, -0.02, 0.01, 0.00, 0.01, -0.01],
    "PRI3": [-0.01, 0.00, 0.01, -0.01, 0.01, -0.01, 0.01, 0.00, 0.01],
}
versions = {v: dict(zip(systems, (b + w for b, w in zip(base, deltas))))
            for v, deltas in wiggle.items()}

result = kendall_tau(versions["RND1"], versions["RND2"], ci=True)
print(f"tau(RND1, RND2) = {result.tau:.3f} over {result.n} systems, "
      f"95% CI [{result.ci_low:.3f}, {result.ci_high:.3f}]")

# All 6 pairs at once, then the strategy-group means of the tau table.
grid = pairwise_tau(versions)
for pair in sorted(grid):
    print(f"  {pair[0]} vs {pair[1]}: tau={grid[pair].tau:.3f}")
group_means = mean_tau_partition(grid)
print("group means:", {g: round(m, 3) for g, m in group_means.items()})

# Are within-RND taus lower than within-PRI taus?  Tukey-Kramer over the
# three groups, with effect sizes in units of the residual deviation.
groups = {"RND-RND": [], "PRI-PRI": [], "RND-PRI": []}
for (a, b), tau in grid.items():
    sa, sb = a[:3], b[:3]
    key = f"{sa}-{sb}" if sa == sb else "RND-PRI"
    groups[key].append(tau.tau)
hsd = tukey_hsd_unpaired(groups)
print(f"residual variance {hsd.residual_variance:.6f}, df={hsd.df}")
for cmp in hsd.pairwise:
    print(f"  {cmp.group_a} vs {cmp.group_b}: diff={cmp.mean_diff:+.4f} "
          f"p={cmp.p_value:.3f} ES={cmp.effect_size:.2f}")
