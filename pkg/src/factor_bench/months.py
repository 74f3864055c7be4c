"""Calendar-month index arithmetic.

A month is a plain ``(year, month)`` integer pair. There is no day-level
time handling anywhere in the library; monthly panels only ever need
ordering, consecutiveness, and formatting.
"""

from __future__ import annotations

from collections.abc import Iterable, Sequence

from .errors import DomainError

Month = tuple[int, int]


def validate_month(month: Month) -> Month:
    year, mon = month
    if not (isinstance(year, int) and isinstance(mon, int)):
        raise DomainError(f"month must be an (int, int) pair, got {month!r}")
    if not 1 <= mon <= 12:
        raise DomainError(f"month number must be in 1..12, got {month!r}")
    return (year, mon)


def next_month(month: Month) -> Month:
    year, mon = month
    return (year + 1, 1) if mon == 12 else (year, mon + 1)


def month_range(start: Month, end: Month) -> list[Month]:
    """All months from ``start`` to ``end`` inclusive."""
    validate_month(start)
    validate_month(end)
    if start > end:
        raise DomainError(f"month range start {format_month(start)} is after end {format_month(end)}")
    out = [start]
    while out[-1] < end:
        out.append(next_month(out[-1]))
    return out


def is_consecutive(months: Sequence[Month]) -> bool:
    """True when months are strictly increasing with no calendar gaps."""
    return all(months[i + 1] == next_month(months[i]) for i in range(len(months) - 1))


def parse_month(text: str) -> Month:
    """Parse 'YYYY-MM' or compact 'YYYYMM'."""
    raw = text.strip()
    try:
        if "-" in raw:
            year_s, mon_s = raw.split("-")
        elif len(raw) == 6:
            year_s, mon_s = raw[:4], raw[4:]
        else:
            raise ValueError(raw)
        month = (int(year_s), int(mon_s))
    except ValueError:
        raise DomainError(f"cannot parse month {text!r} (expected YYYY-MM or YYYYMM)") from None
    return validate_month(month)


def format_month(month: Month) -> str:
    return f"{month[0]:04d}-{month[1]:02d}"


def format_month_compact(month: Month) -> str:
    return f"{month[0]:04d}{month[1]:02d}"


def index_of(months: Iterable[Month], month: Month) -> int:
    for i, m in enumerate(months):
        if m == month:
            return i
    raise DomainError(f"month {format_month(month)} not present in the series")
