"""Aggregate analyses: SC partitions, metric offsets, descriptive statistics and
correlation of metric scores with human labels.

The offset of a metric on a partition is the absolute distance between the
metric's mean and the SC mean on that same partition; on the all-correct
partition that reduces to 1 - mean, on the all-wrong partition to the mean
itself. Correlations are Pearson's r and the tie-corrected Kendall tau-b;
degenerate cases are reported as explicit None ("undefined"), never dropped or
zeroed silently.
"""

from __future__ import annotations

import math
from collections.abc import Mapping, Sequence
from dataclasses import dataclass

from .corpus import Corpus
from .errors import DataError
from .metrics import CANONICAL_METRICS

PARTITION_KINDS = ("whole", "correct", "wrong")


@dataclass(frozen=True)
class Partition:
    """A named subset of labeled sample ids."""

    kind: str
    ids: tuple[str, ...]

    def __len__(self) -> int:
        return len(self.ids)


@dataclass(frozen=True)
class OffsetRow:
    metric: str
    mean_value: float
    offset: float


@dataclass(frozen=True)
class CorrelationRow:
    metric: str
    pearson_r: float | None
    kendall_tau: float | None
    n: int


@dataclass(frozen=True)
class DescriptiveStats:
    min: float
    q1: float
    median: float
    q3: float
    max: float
    mean: float
    std: float


def partition_by_sc(corpus: Corpus) -> tuple[Partition, Partition, Partition]:
    """Split labeled samples into whole / correct (sc=1) / wrong (sc=0).

    Unlabeled samples are excluded; their count is len(corpus) - len(whole).
    """
    labeled = corpus.labeled_samples
    if not labeled:
        raise DataError("no labeled samples: every sample is missing the sc field")
    whole = tuple(s.id for s in labeled)
    correct = tuple(s.id for s in labeled if s.sc == 1)
    wrong = tuple(s.id for s in labeled if s.sc == 0)
    return (
        Partition("whole", whole),
        Partition("correct", correct),
        Partition("wrong", wrong),
    )


def _metric_order(scores: Mapping[str, Mapping[str, float]]) -> tuple[str, ...]:
    any_vector = next(iter(scores.values()))
    return tuple(m for m in CANONICAL_METRICS if m in any_vector)


def _mean(values: Sequence[float]) -> float:
    return math.fsum(values) / len(values)


def offsets(
    corpus: Corpus, scores: Mapping[str, Mapping[str, float]], part: Partition
) -> list[OffsetRow]:
    """Per-metric mean over the partition and its offset from the SC mean."""
    if len(part) == 0:
        raise DataError(f"partition {part.kind!r} is empty")
    missing = [i for i in part.ids if i not in scores]
    if missing:
        raise DataError(f"no scores for sample id(s): {', '.join(missing[:5])}")
    sc_by_id = {s.id: s.sc for s in corpus if s.labeled}
    sc_mean = _mean([float(sc_by_id[i]) for i in part.ids])
    rows = []
    for metric in _metric_order(scores):
        mean_value = _mean([scores[i][metric] for i in part.ids])
        rows.append(OffsetRow(metric, mean_value, abs(mean_value - sc_mean)))
    return rows


def sc_mean(corpus: Corpus, part: Partition) -> float:
    """Mean human label over a partition (the reference marker of the boxplot)."""
    sc_by_id = {s.id: s.sc for s in corpus if s.labeled}
    return _mean([float(sc_by_id[i]) for i in part.ids])


def _quantile(ordered: Sequence[float], q: float) -> float:
    """Linear interpolation between closest ranks on a pre-sorted list."""
    h = (len(ordered) - 1) * q
    lo = math.floor(h)
    if lo + 1 >= len(ordered):
        return ordered[-1]
    return ordered[lo] + (h - lo) * (ordered[lo + 1] - ordered[lo])


def describe(values: Sequence[float]) -> DescriptiveStats:
    """Five-number summary plus mean and population standard deviation."""
    if not values:
        raise DataError("describe() needs at least one value")
    ordered = sorted(values)
    mean = _mean(ordered)
    variance = math.fsum((v - mean) ** 2 for v in ordered) / len(ordered)
    return DescriptiveStats(
        min=ordered[0],
        q1=_quantile(ordered, 0.25),
        median=_quantile(ordered, 0.5),
        q3=_quantile(ordered, 0.75),
        max=ordered[-1],
        mean=mean,
        std=math.sqrt(variance),
    )


def pearson(x: Sequence[float], y: Sequence[float]) -> float | None:
    """Pearson's r: covariance over the product of standard deviations.

    None when either variable is constant (undefined, not NaN).
    """
    if len(x) != len(y):
        raise DataError(f"length mismatch: {len(x)} vs {len(y)}")
    n = len(x)
    if n < 2:
        raise DataError("pearson needs at least 2 observations")
    if all(a == x[0] for a in x) or all(b == y[0] for b in y):
        return None
    mx = _mean(x)
    my = _mean(y)
    cov = math.fsum((a - mx) * (b - my) for a, b in zip(x, y)) / n
    var_x = math.fsum((a - mx) ** 2 for a in x) / n
    var_y = math.fsum((b - my) ** 2 for b in y) / n
    if var_x == 0.0 or var_y == 0.0:
        return None
    r = cov / math.sqrt(var_x * var_y)
    return max(-1.0, min(1.0, r))


def _merge_count_inversions(seq: list[float]) -> int:
    """Number of (i, j) pairs with i < j and seq[i] > seq[j], by merge sort."""
    if len(seq) <= 1:
        return 0
    mid = len(seq) // 2
    left, right = seq[:mid], seq[mid:]
    inversions = _merge_count_inversions(left) + _merge_count_inversions(right)
    i = j = k = 0
    while i < len(left) and j < len(right):
        if left[i] <= right[j]:
            seq[k] = left[i]
            i += 1
        else:
            seq[k] = right[j]
            j += 1
            inversions += len(left) - i
        k += 1
    seq[k:] = left[i:] if i < len(left) else right[j:]
    return inversions


def _tie_pairs(values: Sequence) -> int:
    counts: dict = {}
    for v in values:
        counts[v] = counts.get(v, 0) + 1
    return sum(c * (c - 1) // 2 for c in counts.values())


def kendall_tau(x: Sequence[float], y: Sequence[float]) -> float | None:
    """Tie-corrected Kendall rank correlation (tau-b).

    (C - D) / sqrt((C + D + Tx)(C + D + Ty)); None when all pairs are tied in
    either variable. Discordant pairs are counted via merge-sort inversions of
    y ordered by (x, y), so the whole computation is O(n log n).
    """
    if len(x) != len(y):
        raise DataError(f"length mismatch: {len(x)} vs {len(y)}")
    n = len(x)
    if n < 2:
        raise DataError("kendall_tau needs at least 2 observations")
    n0 = n * (n - 1) // 2
    x_ties = _tie_pairs(x)
    y_ties = _tie_pairs(y)
    if n0 == x_ties or n0 == y_ties:
        return None
    joint_ties = _tie_pairs(list(zip(x, y)))
    y_in_x_order = [yv for _, yv in sorted(zip(x, y))]
    discordant = _merge_count_inversions(y_in_x_order)
    con_minus_dis = n0 - x_ties - y_ties + joint_ties - 2 * discordant
    tau = con_minus_dis / math.sqrt(n0 - x_ties) / math.sqrt(n0 - y_ties)
    return max(-1.0, min(1.0, tau))


def correlate(
    corpus: Corpus, scores: Mapping[str, Mapping[str, float]]
) -> list[CorrelationRow]:
    """Pearson and Kendall correlation of each metric with the human labels,
    over individual labeled samples, in canonical metric order."""
    labeled = [s for s in corpus if s.labeled]
    if len(labeled) < 2:
        raise DataError(f"correlation needs >= 2 labeled samples, have {len(labeled)}")
    missing = [s.id for s in labeled if s.id not in scores]
    if missing:
        raise DataError(f"no scores for sample id(s): {', '.join(missing[:5])}")
    sc = [float(s.sc) for s in labeled]
    rows = []
    for metric in _metric_order(scores):
        values = [scores[s.id][metric] for s in labeled]
        rows.append(
            CorrelationRow(
                metric=metric,
                pearson_r=pearson(values, sc),
                kendall_tau=kendall_tau(values, sc),
                n=len(labeled),
            )
        )
    return rows
