"""Ingestion and alignment of monthly stock returns with factor data.

Covers CSV loading, identity assignment (tickers get reused over time,
so stocks are keyed by (permno, cusip)), the complete-history filter,
excess-return computation, and the early/late window split.

File formats (UTF-8, header required):

* returns panel: ``date,ticker,permno,cusip,ret`` with date ``YYYY-MM``
  and ``ret`` a decimal discrete return;
* factors: ``date,mktrf,smb,hml,rf`` with date ``YYYYMM``; values are
  percent by default (the distribution convention of the usual factor
  libraries) unless ``percent=False``;
* T-bill: ``date,rate`` with date ``YYYY-MM`` and rate an annualized
  percent, de-annualized here by rate / 12 / 100.
"""

from __future__ import annotations

import csv
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from .errors import ConfigError, DomainError, IngestionError
from .months import Month, format_month, is_consecutive, month_range, parse_month
from .returns import ReturnKind, ReturnSeries

StockKey = tuple[str, str]  # (permno, cusip)

PANEL_HEADER = ["date", "ticker", "permno", "cusip", "ret"]
FACTOR_HEADER = ["date", "mktrf", "smb", "hml", "rf"]
TBILL_HEADER = ["date", "rate"]


@dataclass(frozen=True)
class RawRecord:
    """One (stock, month) observation as ingested: a decimal discrete return."""

    month: Month
    ticker: str
    permno: str
    cusip: str
    ret: float

    def __post_init__(self) -> None:
        if not self.permno or not self.cusip:
            raise IngestionError(
                f"record {self.ticker!r} at {format_month(self.month)} has an empty permno or cusip"
            )
        if not self.ret > -1.0:
            raise IngestionError(
                f"record {self.ticker!r} at {format_month(self.month)} has return {self.ret} <= -1"
            )

    @property
    def key(self) -> StockKey:
        return (self.permno, self.cusip)


@dataclass(frozen=True, order=True)
class Identity:
    """Stable per-stock identity: unique label tied to a (permno, cusip) key."""

    label: str
    key: StockKey


@dataclass(frozen=True)
class FactorSeries:
    """Monthly factor data: market premium, SMB, HML, and the risk-free rate."""

    months: tuple[Month, ...]
    mktrf: np.ndarray
    smb: np.ndarray
    hml: np.ndarray
    rf: np.ndarray

    def __post_init__(self) -> None:
        months = tuple(self.months)
        object.__setattr__(self, "months", months)
        for name in ("mktrf", "smb", "hml", "rf"):
            arr = np.array(getattr(self, name), dtype=float)
            arr.setflags(write=False)
            object.__setattr__(self, name, arr)
            if arr.ndim != 1 or arr.size != len(months):
                raise IngestionError(f"factor column {name!r} does not match the month index")
        if len(months) < 1:
            raise IngestionError("empty series")
        if not is_consecutive(months):
            raise IngestionError("factor months must be consecutive, no gaps")

    def restrict(self, months: list[Month]) -> "FactorSeries":
        """The same factors over exactly `months`; every month must be covered."""
        have = {m: i for i, m in enumerate(self.months)}
        missing = [m for m in months if m not in have]
        if missing:
            raise IngestionError(
                "factor data missing months: " + ", ".join(format_month(m) for m in missing)
            )
        idx = [have[m] for m in months]
        return FactorSeries(tuple(months), self.mktrf[idx], self.smb[idx], self.hml[idx], self.rf[idx])


@dataclass(frozen=True)
class AlignedPanel:
    """Per-month joined view of stock excess returns and factor data.

    ``excess`` is |stocks| x |months| in the panel's return kind;
    ``raw`` keeps the ingested decimal discrete returns so a panel can
    be re-emitted and rebuilt without any numeric drift.
    """

    months: tuple[Month, ...]
    stocks: tuple[Identity, ...]
    excess: np.ndarray
    factors: FactorSeries
    kind: ReturnKind
    raw: np.ndarray

    def __post_init__(self) -> None:
        object.__setattr__(self, "months", tuple(self.months))
        object.__setattr__(self, "stocks", tuple(self.stocks))
        for name in ("excess", "raw"):
            arr = np.array(getattr(self, name), dtype=float)
            arr.setflags(write=False)
            object.__setattr__(self, name, arr)
            if arr.shape != (len(self.stocks), len(self.months)):
                raise IngestionError(
                    f"panel matrix {name!r} has shape {arr.shape}, "
                    f"expected ({len(self.stocks)}, {len(self.months)})"
                )
            if not np.all(np.isfinite(arr)):
                raise IngestionError(f"panel matrix {name!r} contains non-finite cells")
        if self.factors.months != self.months:
            raise IngestionError("panel factor months do not match the panel months")
        labels = [s.label for s in self.stocks]
        if len(set(labels)) != len(labels):
            raise IngestionError("panel stock labels are not unique")

    @property
    def n_stocks(self) -> int:
        return len(self.stocks)

    @property
    def n_months(self) -> int:
        return len(self.months)

    def stock_index(self, stock: Identity | str) -> int:
        for i, s in enumerate(self.stocks):
            if s == stock or s.label == stock:
                return i
        name = stock.label if isinstance(stock, Identity) else stock
        raise KeyError(f"stock {name!r} not in panel")

    def stock_excess(self, stock: Identity | str) -> np.ndarray:
        return self.excess[self.stock_index(stock)]

    def stock_returns(self, stock: Identity | str, kind: ReturnKind | None = None) -> ReturnSeries:
        """The stock's raw (not excess) return series, in `kind` (default: panel kind)."""
        kind = kind or self.kind
        idx = self.stock_index(stock)
        row = self.raw[idx]
        values = row if kind is ReturnKind.DISCRETE else np.log1p(row)
        return ReturnSeries(self.stocks[idx].label, self.months, values, kind)

    def to_records(self) -> list[RawRecord]:
        """Flatten back to records; tickers carry the identity labels so the
        panel -> records -> panel round trip is exact."""
        out = []
        for i, stock in enumerate(self.stocks):
            permno, cusip = stock.key
            for t, month in enumerate(self.months):
                out.append(RawRecord(month, stock.label, permno, cusip, float(self.raw[i, t])))
        return out


def assign_identities(records: list[RawRecord]) -> dict[StockKey, Identity]:
    """One Identity per distinct (permno, cusip) key.

    A key keeps the ticker of its earliest record (a relisting under a
    new ticker is still the same business). The label is that ticker
    when the ticker belongs to a single key over the whole input;
    otherwise ticker + '#' + the key's 1-based ordinal among the
    ticker's keys in lexicographic order.
    """
    if not records:
        raise IngestionError("cannot assign identities: no records")
    earliest: dict[StockKey, tuple[Month, int]] = {}
    rep_ticker: dict[StockKey, str] = {}
    ticker_keys: dict[str, set[StockKey]] = {}
    for row, rec in enumerate(records):
        key = rec.key
        ticker_keys.setdefault(rec.ticker, set()).add(key)
        stamp = (rec.month, row)
        if key not in earliest or stamp < earliest[key]:
            earliest[key] = stamp
            rep_ticker[key] = rec.ticker
    out: dict[StockKey, Identity] = {}
    for key, ticker in rep_ticker.items():
        sharing = sorted(ticker_keys[ticker])
        if len(sharing) == 1:
            label = ticker
        else:
            label = f"{ticker}#{sharing.index(key) + 1}"
        out[key] = Identity(label, key)
    return out


def _excess_matrix(raw: np.ndarray, rf: np.ndarray, kind: ReturnKind) -> np.ndarray:
    """Excess returns from raw discrete returns and the raw risk-free rate.

    Discrete: r - rf. Continuous: ln(1+r) - ln(1+rf), which keeps excess
    returns additive over time.
    """
    if kind is ReturnKind.DISCRETE:
        return raw - rf
    return np.log1p(raw) - np.log1p(rf)


def build_panel(
    records: list[RawRecord],
    factors: FactorSeries,
    window: tuple[Month, Month],
    required_len: int = 84,
    kind: ReturnKind = ReturnKind.DISCRETE,
) -> AlignedPanel:
    """Align records and factors over a month window, keeping only stocks
    with exactly one return for every month of the window.

    ``required_len`` states the expected window length and is checked
    against it, so a mis-specified window fails loudly instead of
    silently dropping every stock.
    """
    months = month_range(window[0], window[1])
    if required_len < 1:
        raise ConfigError(f"required_len must be positive, got {required_len}")
    if len(months) != required_len:
        raise ConfigError(
            f"window {format_month(window[0])}..{format_month(window[1])} spans "
            f"{len(months)} months but required_len is {required_len}"
        )
    factors_w = factors.restrict(months)
    identities = assign_identities(records)

    month_pos = {m: t for t, m in enumerate(months)}
    per_key: dict[StockKey, dict[int, float]] = {}
    for rec in records:
        t = month_pos.get(rec.month)
        if t is None:
            continue
        cells = per_key.setdefault(rec.key, {})
        if t in cells:
            raise IngestionError(
                f"duplicate observation for {identities[rec.key].label!r} "
                f"at {format_month(rec.month)}"
            )
        cells[t] = rec.ret

    kept = sorted(
        (identities[key] for key, cells in per_key.items() if len(cells) == len(months)),
    )
    if not kept:
        raise IngestionError("no stock covers every month of the window")
    raw = np.empty((len(kept), len(months)))
    for i, stock in enumerate(kept):
        cells = per_key[stock.key]
        for t in range(len(months)):
            raw[i, t] = cells[t]
    excess = _excess_matrix(raw, factors_w.rf, kind)
    return AlignedPanel(tuple(months), tuple(kept), excess, factors_w, kind, raw)


def window_coverage(records: list[RawRecord], window: tuple[Month, Month]) -> dict[StockKey, int]:
    """Distinct window months observed per stock key (for ingestion reports)."""
    months = set(month_range(window[0], window[1]))
    seen: dict[StockKey, set[Month]] = {}
    for rec in records:
        if rec.month in months:
            seen.setdefault(rec.key, set()).add(rec.month)
    return {key: len(ms) for key, ms in seen.items()}


def split_panel(panel: AlignedPanel, boundary: Month) -> tuple[AlignedPanel, AlignedPanel]:
    """Split into (early: months <= boundary, late: months > boundary).

    Both halves keep the same stock set and order. The boundary must lie
    strictly inside the panel so neither side comes out empty.
    """
    if boundary not in panel.months:
        raise DomainError(f"split boundary {format_month(boundary)} is not a panel month")
    if boundary == panel.months[-1]:
        raise DomainError("split boundary at the last month would leave an empty late panel")
    cut = panel.months.index(boundary) + 1

    def _slice(lo: int, hi: int) -> AlignedPanel:
        months = list(panel.months[lo:hi])
        return AlignedPanel(
            tuple(months),
            panel.stocks,
            panel.excess[:, lo:hi],
            panel.factors.restrict(months),
            panel.kind,
            panel.raw[:, lo:hi],
        )

    return _slice(0, cut), _slice(cut, panel.n_months)


def _read_rows(path: str | Path, expected_header: list[str]) -> list[tuple[int, list[str]]]:
    path = Path(path)
    try:
        text = path.read_text(encoding="utf-8")
    except OSError as err:
        raise IngestionError(f"cannot read {path}: {err}") from err
    reader = csv.reader(text.splitlines())
    rows = [(lineno, row) for lineno, row in enumerate(reader, start=1) if row]
    if not rows:
        raise IngestionError(f"{path}: file is empty")
    header = [cell.strip().lower() for cell in rows[0][1]]
    if header != expected_header:
        raise IngestionError(
            f"{path}: line 1: expected header {','.join(expected_header)!r}, got {','.join(header)!r}"
        )
    return rows[1:]


def load_panel_file(path: str | Path) -> list[RawRecord]:
    """Read a returns panel CSV into records (decimal discrete returns)."""
    records = []
    for lineno, row in _read_rows(path, PANEL_HEADER):
        if len(row) != len(PANEL_HEADER):
            raise IngestionError(f"{path}: line {lineno}: expected {len(PANEL_HEADER)} fields, got {len(row)}")
        date_s, ticker, permno, cusip, ret_s = (cell.strip() for cell in row)
        try:
            month = parse_month(date_s)
            ret = float(ret_s)
            records.append(RawRecord(month, ticker, permno, cusip, ret))
        except (DomainError, IngestionError, ValueError) as err:
            raise IngestionError(f"{path}: line {lineno}: {err}") from err
    if not records:
        raise IngestionError(f"{path}: empty series")
    return records


def load_factor_file(path: str | Path, percent: bool = True) -> FactorSeries:
    """Read a factor CSV; percent inputs (the library convention) are
    divided by 100 unless ``percent=False``."""
    months: list[Month] = []
    columns: list[list[float]] = [[], [], [], []]
    for lineno, row in _read_rows(path, FACTOR_HEADER):
        if len(row) != len(FACTOR_HEADER):
            raise IngestionError(f"{path}: line {lineno}: expected {len(FACTOR_HEADER)} fields, got {len(row)}")
        try:
            months.append(parse_month(row[0].strip()))
            for col, cell in zip(columns, row[1:]):
                col.append(float(cell))
        except (DomainError, ValueError) as err:
            raise IngestionError(f"{path}: line {lineno}: {err}") from err
    if not months:
        raise IngestionError(f"{path}: empty series")
    if not is_consecutive(months):
        raise IngestionError(f"{path}: factor months must be consecutive, no gaps")
    scale = 0.01 if percent else 1.0
    arrays = [np.array(col) * scale for col in columns]
    try:
        return FactorSeries(tuple(months), *arrays)
    except IngestionError as err:
        raise IngestionError(f"{path}: {err}") from err


def load_tbill_file(path: str | Path) -> dict[Month, float]:
    """Read annualized-percent T-bill rates into monthly decimal rates."""
    rates: dict[Month, float] = {}
    for lineno, row in _read_rows(path, TBILL_HEADER):
        if len(row) != len(TBILL_HEADER):
            raise IngestionError(f"{path}: line {lineno}: expected {len(TBILL_HEADER)} fields, got {len(row)}")
        try:
            month = parse_month(row[0].strip())
            rate = float(row[1])
        except (DomainError, ValueError) as err:
            raise IngestionError(f"{path}: line {lineno}: {err}") from err
        if month in rates:
            raise IngestionError(f"{path}: line {lineno}: duplicate month {format_month(month)}")
        rates[month] = rate / 12.0 / 100.0
    if not rates:
        raise IngestionError(f"{path}: empty series")
    return rates


def with_risk_free(factors: FactorSeries, monthly_rf: dict[Month, float]) -> FactorSeries:
    """Replace the factor file's risk-free column with externally sourced rates."""
    missing = [m for m in factors.months if m not in monthly_rf]
    if missing:
        raise IngestionError(
            "T-bill data missing months: " + ", ".join(format_month(m) for m in missing)
        )
    rf = np.array([monthly_rf[m] for m in factors.months])
    return FactorSeries(factors.months, factors.mktrf, factors.smb, factors.hml, rf)
