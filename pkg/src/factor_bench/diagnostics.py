"""Per-stock diagnostics and cross-sectional summaries: Shapiro-Wilk
normality testing, nested-model F-statistics, descriptive statistics,
average-rank vectors with Spearman correlation, and top/bottom slices.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass
from functools import lru_cache
from typing import TYPE_CHECKING

import numpy as np
from scipy.special import ndtr, ndtri

from .dataset import Identity
from .errors import DomainError, EstimationError

if TYPE_CHECKING:
    from .estimators import FitResult


@dataclass(frozen=True)
class DescriptiveStats:
    """Six-number summary: quartiles plus mean."""

    min: float
    q1: float
    median: float
    mean: float
    q3: float
    max: float


@dataclass(frozen=True)
class RankEntry:
    identity: Identity
    value: float
    rank: float


@dataclass(frozen=True)
class RankVector:
    """Average ranks (1..N, ties share the mean of the ranks they span)."""

    entries: tuple[RankEntry, ...]

    def __post_init__(self) -> None:
        object.__setattr__(self, "entries", tuple(self.entries))

    def __len__(self) -> int:
        return len(self.entries)

    def identities(self) -> frozenset[Identity]:
        return frozenset(e.identity for e in self.entries)

    def rank_of(self) -> dict[Identity, float]:
        return {e.identity: e.rank for e in self.entries}


@dataclass(frozen=True)
class NormalityResult:
    identity: Identity
    w_stat: float
    p_value: float


class Direction(enum.Enum):
    ASCENDING = "ascending"
    DESCENDING = "descending"


# ---------------------------------------------------------------------------
# Shapiro-Wilk, Royston's AS R94 approximation (Applied Statistics 44, 1995).
# Polynomial coefficients below are Royston's, highest power first.

_C1 = (-2.706056, 4.434685, -2.07119, -0.147981, 0.221157, 0.0)
_C2 = (-3.582633, 5.682633, -1.752461, -0.293762, 0.042981, 0.0)
_C3 = (-0.0006714, 0.025054, -0.39978, 0.544)
_C4 = (-0.0020322, 0.062767, -0.77857, 1.3822)
_C5 = (0.0038915, -0.083751, -0.31082, -1.5861)
_C6 = (0.0030302, -0.082676, -0.4803)
_GAMMA = (0.459, -2.273)

_MIN_N = 3
_MAX_N = 5000


@lru_cache(maxsize=128)
def _sw_weights(n: int) -> np.ndarray:
    """Signed order-statistic weights a_1..a_n (antisymmetric, unit norm)."""
    if n == 3:
        root_half = math.sqrt(0.5)
        return np.array([-root_half, 0.0, root_half])
    half = n // 2
    ranks = np.arange(1, half + 1)
    m_lower = ndtri((ranks - 0.375) / (n + 0.25))  # negative half of the Blom scores
    m_norm_sq = 2.0 * float(m_lower @ m_lower)
    rsn = 1.0 / math.sqrt(n)
    a_tail = float(np.polyval(_C1, rsn)) - m_lower[0] / math.sqrt(m_norm_sq)
    lower = np.empty(half)
    if n > 5:
        a_next = float(np.polyval(_C2, rsn)) - m_lower[1] / math.sqrt(m_norm_sq)
        scale = math.sqrt(
            (m_norm_sq - 2.0 * m_lower[0] ** 2 - 2.0 * m_lower[1] ** 2)
            / (1.0 - 2.0 * a_tail**2 - 2.0 * a_next**2)
        )
        lower[0] = -a_tail
        lower[1] = -a_next
        lower[2:] = m_lower[2:] / scale
    else:
        scale = math.sqrt((m_norm_sq - 2.0 * m_lower[0] ** 2) / (1.0 - 2.0 * a_tail**2))
        lower[0] = -a_tail
        lower[1:] = m_lower[1:] / scale
    weights = np.zeros(n)
    weights[:half] = lower
    weights[n - half :] = -lower[::-1]
    weights.setflags(write=False)
    return weights


def shapiro_wilk(x: np.ndarray) -> tuple[float, float]:
    """Shapiro-Wilk normality test via Royston's AS R94 approximation.

    Returns (W, p). W is the squared correlation between the sorted
    sample and normal order-statistic weights; the p-value comes from
    Royston's normalizing transform of W (exact for n = 3, a
    three-regime approximation otherwise). Supports 3 <= n <= 5000.
    """
    values = np.asarray(x, dtype=float)
    if values.ndim != 1:
        raise DomainError("shapiro_wilk expects a one-dimensional sample")
    n = values.size
    if n < _MIN_N or n > _MAX_N:
        raise DomainError(f"shapiro_wilk supports sample sizes {_MIN_N}..{_MAX_N}, got {n}")
    xs = np.sort(values)
    if xs[-1] == xs[0]:
        raise DomainError("degenerate input: all sample values are equal")

    weights = _sw_weights(n)
    centered = xs - xs.mean()
    w = float((weights @ xs) ** 2 / ((weights @ weights) * (centered @ centered)))
    w = min(w, 1.0)
    w1 = 1.0 - w

    if n == 3:
        p = (6.0 / math.pi) * (math.asin(math.sqrt(w)) - math.asin(math.sqrt(0.75)))
        return w, min(max(p, 0.0), 1.0)
    if w1 <= 0.0:
        return w, 1.0
    if n <= 11:
        gamma = float(np.polyval(_GAMMA, n))
        y = math.log(w1)
        if y >= gamma:
            return w, 0.0
        y = -math.log(gamma - y)
        mu = float(np.polyval(_C3, n))
        sigma = math.exp(float(np.polyval(_C4, n)))
    else:
        log_n = math.log(n)
        y = math.log(w1)
        mu = float(np.polyval(_C5, log_n))
        sigma = math.exp(float(np.polyval(_C6, log_n)))
    p = float(ndtr(-(y - mu) / sigma))  # upper tail of the normalized statistic
    return w, p


def f_statistic(full: "FitResult", restricted: "FitResult", n: int, p_full: int, q: int) -> float:
    """F-statistic for a restricted model nested inside a full model.

    F = ((rss_restricted - rss_full) / q) / (rss_full / (n - p_full)).
    """
    if q < 1:
        raise EstimationError(f"number of restrictions must be positive, got {q}")
    if n <= p_full:
        raise EstimationError(f"F-statistic needs n > p, got n={n}, p={p_full}")
    if full.rss == 0.0:
        raise EstimationError("perfect fit, F undefined")
    value = ((restricted.rss - full.rss) / q) / (full.rss / (n - p_full))
    return max(value, 0.0)


def describe(values: np.ndarray) -> DescriptiveStats:
    """Six-number summary with quartiles by linear interpolation between
    order statistics (position 1 + (N - 1) * q)."""
    arr = np.asarray(values, dtype=float)
    if arr.size == 0:
        raise DomainError("describe needs at least one value")
    q1, median, q3 = np.percentile(arr, [25.0, 50.0, 75.0])
    return DescriptiveStats(
        float(arr.min()), float(q1), float(median), float(arr.mean()), float(q3), float(arr.max())
    )


def _average_ranks(values: np.ndarray) -> np.ndarray:
    """1-based ranks, ties averaged."""
    order = np.argsort(values, kind="stable")
    ranks = np.empty(values.size)
    i = 0
    while i < values.size:
        j = i
        while j + 1 < values.size and values[order[j + 1]] == values[order[i]]:
            j += 1
        ranks[order[i : j + 1]] = (i + j + 2) / 2.0  # mean of 1-based ranks i+1..j+1
        i = j + 1
    return ranks


def rank_values(entries: list[tuple[Identity, float]], direction: Direction = Direction.ASCENDING) -> RankVector:
    """Rank stocks by value with average ranks for ties.

    Identity labels break ties only in the presentation order of the
    entries, never in the rank values themselves.
    """
    if not entries:
        raise DomainError("rank_values needs at least one entry")
    values = np.array([v for _, v in entries], dtype=float)
    keyed = values if direction is Direction.ASCENDING else -values
    ranks = _average_ranks(keyed)
    ranked = [
        RankEntry(identity, float(value), float(rank))
        for (identity, value), rank in zip(entries, ranks)
    ]
    ranked.sort(key=lambda e: (e.rank, e.identity.label))
    return RankVector(tuple(ranked))


def rank_correlation(a: RankVector, b: RankVector) -> float:
    """Spearman correlation: Pearson correlation of the two rank vectors
    matched by identity."""
    if a.identities() != b.identities():
        raise DomainError("rank vectors cover different identity sets")
    b_rank = b.rank_of()
    x = np.array([e.rank for e in a.entries])
    y = np.array([b_rank[e.identity] for e in a.entries])
    dx = x - x.mean()
    dy = y - y.mean()
    denom = math.sqrt(float(dx @ dx) * float(dy @ dy))
    if denom == 0.0:
        raise DomainError("rank correlation undefined: a rank vector has zero variance")
    return float(dx @ dy) / denom


def extreme_slice(r: RankVector, fraction: float) -> tuple[list[Identity], list[Identity]]:
    """Top and bottom slices by value.

    k = round(fraction * N) with half-up rounding, at least 1. The top
    list is the k highest values in descending order, bottom the k
    lowest ascending; value ties break by identity label.
    """
    if not 0.0 < fraction <= 0.5:
        raise DomainError(f"fraction must lie in (0, 0.5], got {fraction}")
    n = len(r.entries)
    if n == 0:
        raise DomainError("extreme_slice needs a nonempty rank vector")
    k = max(1, int(math.floor(fraction * n + 0.5)))
    by_value = sorted(r.entries, key=lambda e: (e.value, e.identity.label))
    bottom = [e.identity for e in by_value[:k]]
    top = [e.identity for e in sorted(r.entries, key=lambda e: (-e.value, e.identity.label))[:k]]
    return top, bottom
