"""Inter-assessor agreement: ordinal Krippendorff's alpha and quadratic weighted kappa.

Alpha is computed from a coincidence matrix over pairable units (units carrying
at least two labels); the ordinal disagreement between categories c and k is the
squared distance between their cumulative marginals.  Kappa is the two-rater
quadratic-weighted variant, computed per topic and macro-averaged.
"""

from __future__ import annotations

from dataclasses import dataclass

from .model import NA, DataError, LabelMatrix, Qrels

__all__ = [
    "CoincidenceMatrix",
    "AgreementResult",
    "PerTopicAlpha",
    "DegenerateKappaError",
    "coincidence_matrix",
    "krippendorff_alpha_ordinal",
    "leave_one_out_alpha",
    "mean_per_topic_alpha",
    "quadratic_weighted_kappa",
    "per_topic_kappa",
    "matrix_from_qrels",
]

_LEVELS = (0, 1, 2)


class DegenerateKappaError(DataError):
    """Expected disagreement is zero (both raters constant)."""


@dataclass(frozen=True)
class CoincidenceMatrix:
    """Pairwise label coincidences o(c,k), their marginals, and the total n."""

    counts: tuple  # 3x3, counts[c][k] = o(c, k)
    marginals: tuple  # n_c = row sums
    n: float

    def delta_sq(self, c: int, k: int) -> float:
        """Ordinal distance: squared gap between cumulative marginals of c and k."""
        lo, hi = min(c, k), max(c, k)
        between = sum(self.marginals[g] for g in range(lo, hi + 1))
        return (between - (self.marginals[c] + self.marginals[k]) / 2.0) ** 2


@dataclass(frozen=True)
class AgreementResult:
    alpha: float
    D_o: float
    D_e: float
    unit_count: int


@dataclass(frozen=True)
class PerTopicAlpha:
    mean: float
    per_topic: dict  # topic -> alpha
    failed: dict  # topic -> reason, for topics whose alpha is undefined


def coincidence_matrix(unit_labels) -> CoincidenceMatrix:
    """Build the 3x3 coincidence matrix from per-unit label lists.

    A unit with m >= 2 labels contributes each ordered label pair with weight
    1/(m-1); units with fewer than two labels are not pairable and are skipped.
    """
    counts = [[0.0] * 3 for _ in _LEVELS]
    for labels in unit_labels:
        m = len(labels)
        if m < 2:
            continue
        hist = [0, 0, 0]
        for lv in labels:
            hist[lv] += 1
        w = 1.0 / (m - 1)
        for c in _LEVELS:
            if not hist[c]:
                continue
            for k in _LEVELS:
                if not hist[k]:
                    continue
                pairs = hist[c] * (hist[k] - (1 if c == k else 0))
                if pairs:
                    counts[c][k] += pairs * w
    marginals = tuple(sum(row) for row in counts)
    return CoincidenceMatrix(counts=tuple(tuple(row) for row in counts),
                             marginals=marginals, n=sum(marginals))


def _pairable_unit_labels(matrix: LabelMatrix, unit_indices=None):
    indices = range(len(matrix.units)) if unit_indices is None else unit_indices
    units = []
    for i in indices:
        labels = [v for v in matrix.cells[i] if v != NA]
        if len(labels) >= 2:
            units.append(labels)
    return units


def _alpha_from_units(unit_labels) -> AgreementResult:
    if not unit_labels:
        raise DataError("no pairable units (every unit has fewer than two labels)")
    co = coincidence_matrix(unit_labels)
    D_o = sum(co.counts[c][k] * co.delta_sq(c, k)
              for c in _LEVELS for k in _LEVELS if c != k) / co.n
    D_e = sum(co.marginals[c] * co.marginals[k] * co.delta_sq(c, k)
              for c in _LEVELS for k in _LEVELS if c != k) / (co.n * (co.n - 1))
    # All labels identical makes expected disagreement zero; that is perfect
    # agreement, so alpha is defined as 1.
    alpha = 1.0 if D_e == 0.0 else 1.0 - D_o / D_e
    return AgreementResult(alpha=alpha, D_o=D_o, D_e=D_e, unit_count=len(unit_labels))


def krippendorff_alpha_ordinal(matrix: LabelMatrix) -> AgreementResult:
    """Ordinal Krippendorff's alpha over all pairable units of the matrix."""
    return _alpha_from_units(_pairable_unit_labels(matrix))


def leave_one_out_alpha(matrix: LabelMatrix, assessor_id: str) -> AgreementResult:
    """Alpha with one coder's column replaced by NA."""
    return krippendorff_alpha_ordinal(matrix.drop_assessor(assessor_id))


def _project(matrix: LabelMatrix, projection: str) -> LabelMatrix:
    projection = projection.upper()
    if projection == "ALL":
        return matrix
    if projection in ("RND", "PRI"):
        keep = [a for a in matrix.assessors if a.upper().startswith(projection)]
        if not keep:
            raise DataError(f"no coder ids match projection {projection!r}")
        return matrix.select_assessors(keep)
    raise DataError(f"unknown projection {projection!r}; expected ALL, RND, or PRI")


def mean_per_topic_alpha(matrix: LabelMatrix, topics: list | None = None,
                         projection: str = "ALL") -> PerTopicAlpha:
    """Per-topic alpha list plus the arithmetic mean over computable topics.

    For RND/PRI projections the matrix columns must be qrels version ids
    (RND1..RND4, PRI1..PRI4); the projection keeps the matching quadruple.
    Topics whose alpha is undefined are reported in ``failed``, never dropped
    silently.
    """
    projected = _project(matrix, projection)
    if topics is None:
        topics = projected.topics()
    if not topics:
        raise DataError("empty topic set")
    per_topic, failed = {}, {}
    for topic in topics:
        unit_labels = _pairable_unit_labels(projected, projected.topic_units(topic))
        try:
            per_topic[topic] = _alpha_from_units(unit_labels).alpha
        except DataError as exc:
            failed[topic] = str(exc)
    if not per_topic:
        raise DataError("alpha undefined for every topic in the set")
    mean = sum(per_topic.values()) / len(per_topic)
    return PerTopicAlpha(mean=mean, per_topic=per_topic, failed=failed)


def quadratic_weighted_kappa(labels_a: list, labels_b: list, categories: int = 3) -> float:
    """Two-rater kappa with disagreement weights (i-j)^2 / (K-1)^2."""
    if len(labels_a) != len(labels_b):
        raise DataError("label vectors must have equal length")
    n = len(labels_a)
    if n < 1:
        raise DataError("at least one unit required")
    K = categories
    observed = [[0.0] * K for _ in range(K)]
    for a, b in zip(labels_a, labels_b):
        if not (0 <= a < K and 0 <= b < K):
            raise DataError(f"label outside 0..{K - 1}")
        observed[a][b] += 1.0 / n
    marg_a = [sum(observed[i][j] for j in range(K)) for i in range(K)]
    marg_b = [sum(observed[i][j] for i in range(K)) for j in range(K)]

    def weight(i, j):
        return (i - j) ** 2 / (K - 1) ** 2

    weighted_observed = sum(weight(i, j) * observed[i][j] for i in range(K) for j in range(K))
    weighted_expected = sum(weight(i, j) * marg_a[i] * marg_b[j] for i in range(K) for j in range(K))
    if weighted_expected == 0.0:
        raise DegenerateKappaError("expected disagreement is zero (both raters constant)")
    return 1.0 - weighted_observed / weighted_expected


def per_topic_kappa(qrels_a: Qrels, qrels_b: Qrels, topics: list | None = None,
                    on_degenerate: str = "error"):
    """Per-topic quadratic weighted kappa between two qrels versions, plus the mean.

    Units are each topic's documents judged in both versions.  Degenerate
    topics (both versions constant) raise by default; pass
    ``on_degenerate="skip"`` to report them separately instead.
    """
    if topics is None:
        topics = sorted(set(qrels_a.entries) & set(qrels_b.entries))
    if not topics:
        raise DataError("no common topics")
    per_topic, skipped = {}, {}
    for topic in topics:
        docs_a = qrels_a.entries.get(topic, {})
        docs_b = qrels_b.entries.get(topic, {})
        common = sorted(set(docs_a) & set(docs_b))
        if not common:
            raise DataError(f"topic {topic}: no documents judged in both versions")
        labels_a = [docs_a[d] for d in common]
        labels_b = [docs_b[d] for d in common]
        try:
            per_topic[topic] = quadratic_weighted_kappa(labels_a, labels_b)
        except DegenerateKappaError:
            if on_degenerate == "skip":
                skipped[topic] = "degenerate (both versions constant)"
            else:
                raise
    if not per_topic:
        raise DataError("kappa undefined for every topic")
    mean = sum(per_topic.values()) / len(per_topic)
    return mean, per_topic, skipped


def matrix_from_qrels(versions: list, units: list | None = None) -> LabelMatrix:
    """Label matrix whose coders are qrels versions (for per-topic agreement).

    ``units`` defaults to the union of judged topicdocs over all versions,
    sorted by (topic, doc).  A version that did not judge a unit gets NA.
    """
    if not versions:
        raise DataError("at least one qrels version required")
    if units is None:
        seen = set()
        for q in versions:
            for topic, docs in q.entries.items():
                seen.update((topic, doc) for doc in docs)
        units = sorted(seen)
    cells = []
    for topic, doc in units:
        cells.append(tuple(
            q.entries.get(topic, {}).get(doc, NA) if q.is_judged(topic, doc) else NA
            for q in versions
        ))
    return LabelMatrix(units=tuple(units),
                       assessors=tuple(q.version_id for q in versions),
                       cells=tuple(cells))
