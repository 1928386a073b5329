"""Ranking-comparison and experiment statistics.

Kendall's tau (tau-a) with Fisher-z confidence intervals, paired and unpaired
Tukey HSD with residual-variance effect sizes, the paired t-test with Glass's
delta, and prospective power / sample-size analysis for paired t-tests.

The studentized range CDF that both Tukey variants need is computed here by
Gauss-Legendre double quadrature (outer integral over the scale variable,
inner over the range), with the chi density evaluated in log space so large
residual degrees of freedom do not overflow.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from numpy.polynomial.legendre import leggauss
from scipy import stats
from scipy.special import gammaln, ndtr

from .model import DataError

__all__ = [
    "TauResult",
    "PairwiseComparison",
    "TukeyResult",
    "PowerResult",
    "kendall_tau",
    "tau_fisher_ci",
    "pairwise_tau",
    "mean_tau_partition",
    "studentized_range_cdf",
    "noncentral_t_cdf",
    "tukey_hsd_paired",
    "tukey_hsd_unpaired",
    "tukey_p_paired_summary",
    "tukey_p_unpaired_summary",
    "paired_t",
    "power_pairedt",
]

_Z975 = 1.959964


@dataclass(frozen=True)
class TauResult:
    tau: float
    n: int
    ci_low: float | None = None
    ci_high: float | None = None
    tied_pairs: int = 0


@dataclass(frozen=True)
class PairwiseComparison:
    group_a: str
    group_b: str
    mean_diff: float  # mean(a) - mean(b)
    q_statistic: float
    p_value: float
    effect_size: float  # mean_diff / sqrt(residual variance)


@dataclass(frozen=True)
class TukeyResult:
    design: str  # "paired" or "unpaired"
    residual_variance: float  # V_E2 for paired, V_E1 for unpaired
    df: int
    n_blocks: int  # blocks kept (paired) or total observations (unpaired)
    group_means: dict
    pairwise: tuple  # of PairwiseComparison


@dataclass(frozen=True)
class PowerResult:
    pilot_t: float
    pilot_n: int
    alpha: float
    target_power: float
    achieved_power: float
    required_n_for_target: int


# ---------------------------------------------------------------------------
# Kendall's tau (tau-a) and its Fisher-z interval.

def kendall_tau(scores_a, scores_b, ci: bool = False) -> TauResult:
    """Tau-a between two per-run score vectors; tied pairs contribute zero.

    Accepts two aligned sequences, or two dicts keyed by run tag (which must
    have identical key sets and are aligned on sorted tags).
    """
    if isinstance(scores_a, dict) or isinstance(scores_b, dict):
        if set(scores_a) != set(scores_b):
            raise DataError("run sets differ between the two score vectors")
        tags = sorted(scores_a)
        a = [scores_a[t] for t in tags]
        b = [scores_b[t] for t in tags]
    else:
        a, b = list(scores_a), list(scores_b)
        if len(a) != len(b):
            raise DataError("score vectors must have equal length")
    n = len(a)
    if n < 2:
        raise DataError("at least two systems required")
    concordant = discordant = tied = 0
    for i in range(n):
        for j in range(i + 1, n):
            da = a[i] - a[j]
            db = b[i] - b[j]
            if da == 0 or db == 0:
                tied += 1
            # compare signs, never the product: a product of two tiny
            # differences can underflow to zero and misclassify the pair
            elif (da > 0) == (db > 0):
                concordant += 1
            else:
                discordant += 1
    tau = (concordant - discordant) / (n * (n - 1) / 2)
    result = TauResult(tau=tau, n=n, tied_pairs=tied)
    if ci:
        low, high = tau_fisher_ci(tau, n)
        result = TauResult(tau=tau, n=n, ci_low=low, ci_high=high, tied_pairs=tied)
    return result


def tau_fisher_ci(tau: float, n: int) -> tuple:
    """95% CI for tau via Fisher z with variance 0.437/(n-4)."""
    if abs(tau) >= 1.0:
        return (tau, tau)  # degenerate: point interval
    if n < 5:
        raise DataError("Fisher-z interval needs n >= 5")
    z = math.atanh(tau)
    se = math.sqrt(0.437 / (n - 4))
    return (math.tanh(z - _Z975 * se), math.tanh(z + _Z975 * se))


def pairwise_tau(means_by_version: dict, ci: bool = False) -> dict:
    """Tau for every unordered pair of versions, from per-run mean score dicts."""
    names = sorted(means_by_version)
    out = {}
    for i, a in enumerate(names):
        for b in names[i + 1:]:
            out[(a, b)] = kendall_tau(means_by_version[a], means_by_version[b], ci=ci)
    return out


def mean_tau_partition(tau_by_pair: dict) -> dict:
    """Group means of a full 8-version tau table: RND-RND, PRI-PRI, RND-PRI.

    Keys are (version_a, version_b) tuples whose names start with RND or PRI;
    values are floats or TauResult.  All 28 unordered pairs must be present.
    """
    groups = {"RND-RND": [], "PRI-PRI": [], "RND-PRI": []}
    names = set()
    for (a, b), value in tau_by_pair.items():
        tau = value.tau if isinstance(value, TauResult) else float(value)
        names.update((a, b))
        sa = "RND" if a.upper().startswith("RND") else "PRI"
        sb = "RND" if b.upper().startswith("RND") else "PRI"
        key = f"{sa}-{sb}" if sa == sb else "RND-PRI"
        groups[key].append(tau)
    expected_pairs = len(names) * (len(names) - 1) // 2
    if len(tau_by_pair) != expected_pairs:
        raise DataError(f"tau table incomplete: {len(tau_by_pair)} of {expected_pairs} pairs")
    return {key: sum(vals) / len(vals) for key, vals in groups.items() if vals}


# ---------------------------------------------------------------------------
# Studentized range distribution by double Gauss-Legendre quadrature.

_GL_CACHE: dict = {}


def _gl(n: int, lo: float, hi: float):
    if n not in _GL_CACHE:
        _GL_CACHE[n] = leggauss(n)
    x, w = _GL_CACHE[n]
    half = 0.5 * (hi - lo)
    return half * x + 0.5 * (hi + lo), half * w


def _range_cdf(w: np.ndarray, k: int) -> np.ndarray:
    """CDF of the range of k standard normals, evaluated at each w."""
    u, wu = _gl(160, -9.0, 9.0)
    phi = np.exp(-0.5 * u * u) / math.sqrt(2.0 * math.pi)
    diff = ndtr(u[None, :] + w[:, None]) - ndtr(u)[None, :]
    np.clip(diff, 0.0, 1.0, out=diff)
    vals = k * (diff ** (k - 1)) @ (wu * phi)
    return np.clip(vals, 0.0, 1.0)


def studentized_range_cdf(q: float, k: int, df: float) -> float:
    """P(Q_{k,df} <= q), absolute accuracy well under 1e-5.

    Outer integral over the scale variable s = chi_df / sqrt(df) (log-space
    density), inner integral the k-normal range CDF at q*s.
    """
    if k < 2:
        raise DataError("studentized range needs k >= 2 groups")
    if df < 1:
        raise DataError("studentized range needs df >= 1")
    if q <= 0.0:
        return 0.0
    nu = float(df)
    lo = stats.chi.ppf(1e-12, nu) / math.sqrt(nu)
    hi = stats.chi.ppf(1.0 - 1e-12, nu) / math.sqrt(nu)
    if not (np.isfinite(lo) and np.isfinite(hi) and hi > lo):
        raise DataError(f"quadrature bounds failed for df={df}")
    s, ws = _gl(160, lo, hi)
    log_density = ((1.0 - nu / 2.0) * math.log(2.0)
                   + (nu / 2.0) * math.log(nu)
                   - gammaln(nu / 2.0)
                   + (nu - 1.0) * np.log(s)
                   - nu * s * s / 2.0)
    value = float(np.sum(ws * np.exp(log_density) * _range_cdf(q * s, k)))
    return min(max(value, 0.0), 1.0)


def noncentral_t_cdf(x: float, df: float, ncp: float) -> float:
    """Noncentral t CDF (central t when ncp == 0); accuracy 1e-6 or better."""
    if df < 1:
        raise DataError("noncentral t needs df >= 1")
    if ncp == 0.0:
        return float(stats.t.cdf(x, df))
    if abs(ncp) > 37.0:
        # the distribution mass is entirely on one side of any representable x
        return float(ncp < 0.0) if x == 0 else float(stats.norm.cdf(x - ncp))
    return float(stats.nct.cdf(x, df, ncp))


# ---------------------------------------------------------------------------
# Tukey HSD, paired (randomized block) and unpaired (Tukey-Kramer).

def _pairwise(names, means, se_for_pair, residual_variance, k, df):
    comparisons = []
    for i, a in enumerate(names):
        for b in names[i + 1:]:
            diff = means[a] - means[b]
            se = se_for_pair(a, b)
            q = abs(diff) / se
            p = 1.0 - studentized_range_cdf(q, k, df)
            comparisons.append(PairwiseComparison(
                group_a=a, group_b=b, mean_diff=diff, q_statistic=q,
                p_value=p, effect_size=diff / math.sqrt(residual_variance)))
    return tuple(comparisons)


def _degenerate_pairwise(names, means):
    """All-equal-means, zero-residual-variance case: q = 0, p = 1, ES = 0.

    Any nonzero mean difference alongside zero residual variance makes q
    infinite, which has no sensible p or effect size, so that is an error.
    """
    comparisons = []
    for i, a in enumerate(names):
        for b in names[i + 1:]:
            if means[a] - means[b] != 0.0:
                raise DataError(
                    "zero residual variance with unequal group means; "
                    "q statistic undefined")
            comparisons.append(PairwiseComparison(
                group_a=a, group_b=b, mean_diff=0.0, q_statistic=0.0,
                p_value=1.0, effect_size=0.0))
    return tuple(comparisons)


def tukey_hsd_paired(table, treatments: list) -> TukeyResult:
    """Paired Tukey HSD over a blocks x treatments table (no replication).

    Blocks containing NA/NaN are dropped listwise.  The residual variance is
    the two-way ANOVA residual mean square V_E2 with df = (k-1)(n-1);
    pairwise q = |diff| / sqrt(V_E2 / n) and effect size = diff / sqrt(V_E2).
    """
    data = np.asarray(table, dtype=float)
    if data.ndim != 2 or data.shape[1] != len(treatments):
        raise DataError("table must be 2-D with one column per treatment")
    data = data[~np.isnan(data).any(axis=1)]
    n, k = data.shape
    if k < 2:
        raise DataError("at least two treatments required")
    if n < 2:
        raise DataError("at least two complete blocks required")
    grand = data.mean()
    row_means = data.mean(axis=1, keepdims=True)
    col_means = data.mean(axis=0, keepdims=True)
    residuals = data - row_means - col_means + grand
    df = (k - 1) * (n - 1)
    v_e2 = float((residuals ** 2).sum() / df)
    means = {name: float(data[:, j].mean()) for j, name in enumerate(treatments)}
    if v_e2 <= 0.0:
        pairwise = _degenerate_pairwise(treatments, means)
    else:
        se = math.sqrt(v_e2 / n)
        pairwise = _pairwise(treatments, means, lambda a, b: se, v_e2, k, df)
    return TukeyResult(design="paired", residual_variance=v_e2, df=df,
                       n_blocks=n, group_means=means, pairwise=pairwise)


def tukey_hsd_unpaired(groups: dict) -> TukeyResult:
    """Tukey-Kramer HSD over unpaired groups (dict name -> observations).

    The residual variance is the one-way ANOVA residual mean square V_E1 with
    df = N - k; pairwise q uses se = sqrt(V_E1 * (1/n_a + 1/n_b) / 2).
    """
    names = list(groups)
    if len(names) < 2:
        raise DataError("at least two groups required")
    arrays = {}
    for name in names:
        arr = np.asarray(groups[name], dtype=float)
        if arr.size < 2:
            raise DataError(f"group {name!r} needs at least two observations")
        arrays[name] = arr
    k = len(names)
    total_n = sum(arr.size for arr in arrays.values())
    df = total_n - k
    within_ss = sum(float(((arr - arr.mean()) ** 2).sum()) for arr in arrays.values())
    v_e1 = within_ss / df
    means = {name: float(arr.mean()) for name, arr in arrays.items()}
    sizes = {name: arr.size for name, arr in arrays.items()}
    if v_e1 <= 0.0:
        pairwise = _degenerate_pairwise(names, means)
    else:
        def se_for_pair(a, b):
            return math.sqrt(v_e1 * (1.0 / sizes[a] + 1.0 / sizes[b]) / 2.0)

        pairwise = _pairwise(names, means, se_for_pair, v_e1, k, df)
    return TukeyResult(design="unpaired", residual_variance=v_e1, df=df,
                       n_blocks=total_n, group_means=means, pairwise=pairwise)


def tukey_p_paired_summary(mean_diff: float, v_e2: float, n: int, k: int) -> float:
    """Paired Tukey p for one pair reconstructed from printed summaries."""
    q = abs(mean_diff) / math.sqrt(v_e2 / n)
    return 1.0 - studentized_range_cdf(q, k, (k - 1) * (n - 1))


def tukey_p_unpaired_summary(mean_diff: float, v_e1: float, n_a: int, n_b: int,
                             k: int, total_n: int) -> float:
    """Tukey-Kramer p for one pair reconstructed from printed summaries."""
    se = math.sqrt(v_e1 * (1.0 / n_a + 1.0 / n_b) / 2.0)
    q = abs(mean_diff) / se
    return 1.0 - studentized_range_cdf(q, k, total_n - k)


# ---------------------------------------------------------------------------
# Paired t-test and prospective power analysis.

def paired_t(a, b) -> tuple:
    """Paired t-test: returns (t, two-sided p, Glass's delta).

    Glass's delta standardises the mean difference by the FIRST sample's
    standard deviation, so pass the baseline (e.g. the randomised condition)
    as ``a``.
    """
    a = np.asarray(a, dtype=float)
    b = np.asarray(b, dtype=float)
    if a.shape != b.shape or a.ndim != 1:
        raise DataError("paired t-test needs two equal-length vectors")
    n = a.size
    if n < 2:
        raise DataError("paired t-test needs n >= 2")
    d = a - b
    sd_d = float(d.std(ddof=1))
    sd_a = float(a.std(ddof=1))
    if sd_a == 0.0:
        raise DataError("first sample has zero variance; Glass's delta undefined")
    delta = float(d.mean()) / sd_a
    if sd_d == 0.0:
        mean_d = float(d.mean())
        if mean_d == 0.0:
            return 0.0, 1.0, delta
        # a pure constant shift: t diverges but the effect size stays defined
        return math.copysign(math.inf, mean_d), 0.0, delta
    t = float(d.mean()) / (sd_d / math.sqrt(n))
    p = 2.0 * float(stats.t.sf(abs(t), n - 1))
    return t, p, delta


def _power_at(d: float, n: int, alpha: float) -> float:
    """Power of a two-sided paired t-test at sample size n, effect size d."""
    df = n - 1
    tcrit = float(stats.t.ppf(1.0 - alpha / 2.0, df))
    ncp = d * math.sqrt(n)
    return (1.0 - noncentral_t_cdf(tcrit, df, ncp)) + noncentral_t_cdf(-tcrit, df, ncp)


# Powers matching the target at published 3-decimal granularity count as
# having crossed it, so sample sizes reproduce tables computed from unrounded
# pilot statistics.
_POWER_SLACK = 5e-4


def power_pairedt(pilot_t: float, pilot_n: int, alpha: float = 0.05,
                  target_power: float = 0.70, max_n: int = 1_000_000) -> PowerResult:
    """Achieved power at the pilot size and the smallest n reaching the target.

    The pilot effect size is d = t / sqrt(n_pilot); power at any n is the
    two-sided noncentral-t rejection probability with ncp = d * sqrt(n).  The
    required-n search walks up from n = 2, takes the first crossing, and
    verifies the next three sizes also stay at or above the target.
    """
    if pilot_n < 2:
        raise DataError("pilot n must be >= 2")
    if not 0.0 < target_power < 1.0:
        raise DataError("target power must be in (0, 1)")
    if not 0.0 < alpha < 1.0:
        raise DataError("alpha must be in (0, 1)")
    d = pilot_t / math.sqrt(pilot_n)
    achieved = _power_at(d, pilot_n, alpha)
    threshold = target_power - _POWER_SLACK
    required = None
    n = 2
    while n <= max_n:
        if _power_at(d, n, alpha) >= threshold:
            if all(_power_at(d, n + i, alpha) >= threshold for i in (1, 2, 3)):
                required = n
                break
        n += 1
    if required is None:
        raise DataError(f"target power {target_power} not reached by n = {max_n}")
    return PowerResult(pilot_t=pilot_t, pilot_n=pilot_n, alpha=alpha,
                       target_power=target_power, achieved_power=achieved,
                       required_n_for_target=required)
