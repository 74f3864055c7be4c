"""Return arithmetic: holding-period returns, discrete/continuous
conversion, geometric averages, and sample volatility.

Returns are decimals everywhere (0.05 means 5%); percent conversion
happens only at ingestion. All functions are pure and operate on
immutable inputs.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass

import numpy as np

from .errors import DomainError
from .months import Month, format_month, is_consecutive


class ReturnKind(enum.Enum):
    """Compounding convention of a return series."""

    DISCRETE = "discrete"
    CONTINUOUS = "continuous"


@dataclass(frozen=True)
class ReturnSeries:
    """One stock's ordered monthly returns.

    Months must be consecutive calendar months and values are decimal
    returns of the stated kind. Discrete values must stay above -1: a
    -100% return has no log-return counterpart.
    """

    identity: str
    months: tuple[Month, ...]
    values: np.ndarray
    kind: ReturnKind

    def __post_init__(self) -> None:
        months = tuple(self.months)
        values = np.array(self.values, dtype=float)
        values.setflags(write=False)
        object.__setattr__(self, "months", months)
        object.__setattr__(self, "values", values)
        if values.ndim != 1:
            raise DomainError("return values must be a one-dimensional sequence")
        if values.size < 1:
            raise DomainError(f"return series {self.identity!r} is empty")
        if values.size != len(months):
            raise DomainError(
                f"return series {self.identity!r} has {values.size} values for {len(months)} months"
            )
        if not is_consecutive(months):
            raise DomainError(f"return series {self.identity!r} months must be consecutive, no gaps")
        if self.kind is ReturnKind.DISCRETE:
            bad = np.nonzero(values <= -1.0)[0]
            if bad.size:
                raise DomainError(
                    f"discrete return <= -100% in series {self.identity!r} "
                    f"at month {format_month(months[int(bad[0])])}"
                )

    def __len__(self) -> int:
        return len(self.months)


def holding_period_return(initial_price: float, end_price: float, income: float = 0.0) -> float:
    """Total discrete return of holding an asset over one period.

    Formula: (end_price - initial_price + income) / initial_price.
    """
    if initial_price <= 0.0:
        raise DomainError(f"initial price must be positive, got {initial_price}")
    if end_price <= 0.0:
        raise DomainError(f"end price must be positive, got {end_price}")
    if income < 0.0:
        raise DomainError(f"income must be nonnegative, got {income}")
    return (end_price - initial_price + income) / initial_price


def to_continuous(r_d: float) -> float:
    """Continuously-compounded counterpart of a discrete return: ln(1 + r_d)."""
    if r_d <= -1.0:
        raise DomainError(f"discrete return must exceed -1 for log conversion, got {r_d}")
    return math.log1p(r_d)


def to_discrete(r_c: float) -> float:
    """Discrete counterpart of a continuously-compounded return: exp(r_c) - 1."""
    return math.expm1(r_c)


def convert_series(series: ReturnSeries, target: ReturnKind) -> ReturnSeries:
    """Convert a series between discrete and continuous compounding.

    Elementwise ln(1 + r) going discrete -> continuous and exp(r) - 1
    going back; returns the input unchanged when kinds already match.
    """
    if series.kind is target:
        return series
    if target is ReturnKind.CONTINUOUS:
        values = np.log1p(series.values)
    else:
        values = np.expm1(series.values)
    return ReturnSeries(series.identity, series.months, values, target)


def geometric_average(series: ReturnSeries) -> float:
    """Compounding-consistent average return of a series.

    Discrete kind: (prod(1 + r_i))^(1/m) - 1, evaluated in log space so
    that log(1 + result) equals the mean of the log returns exactly.
    Continuous kind: the arithmetic mean (log returns add over time, so
    their mean is already the log of the geometric gross mean).
    """
    if len(series) < 1:
        raise DomainError("geometric average of an empty series is undefined")
    if series.kind is ReturnKind.CONTINUOUS:
        return float(np.mean(series.values))
    return math.expm1(float(np.mean(np.log1p(series.values))))


def sample_std(series: ReturnSeries) -> float:
    """Sample standard deviation with the m - 1 divisor.

    Formula: sqrt( sum((r_i - rbar)^2) / (m - 1) ). Kind-generic: the
    same formula applies to discrete and continuous values.
    """
    if len(series) < 2:
        raise DomainError("sample standard deviation needs at least two observations")
    return float(np.std(series.values, ddof=1))
