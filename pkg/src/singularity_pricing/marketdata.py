"""Monthly market series: Shiller-format P/D and a rebased index ratio.

Inputs are plain CSV files with ``YYYY-MM`` months:

* Shiller format: ``month,price,dividend`` where ``dividend`` is the
  annualised monthly dividend, as in Shiller's spreadsheet.
* Index files: ``month,close``.
"""

from __future__ import annotations

import csv
import re
from dataclasses import dataclass
from pathlib import Path

_MONTH = re.compile(r"^(\d{4})-(0[1-9]|1[0-2])$")


class MarketDataError(ValueError):
    pass


class RebaseError(MarketDataError):
    pass


@dataclass(frozen=True)
class MarketSeries:
    label: str
    observations: tuple[tuple[str, float], ...]

    def __post_init__(self):
        months = [m for m, _ in self.observations]
        if any(a >= b for a, b in zip(months, months[1:])):
            raise MarketDataError(f"{self.label}: months must be strictly increasing")

    @property
    def months(self) -> list[str]:
        return [m for m, _ in self.observations]

    def as_dict(self) -> dict[str, float]:
        return dict(self.observations)


def _parse_positive(text, path, lineno, column):
    try:
        value = float(text)
    except ValueError:
        raise MarketDataError(f"{path}:{lineno}: {column}={text!r} is not a number") from None
    if not value > 0.0:
        raise MarketDataError(f"{path}:{lineno}: {column}={text!r} must be positive")
    return value


def _read_rows(path, columns):
    path = Path(path)
    with path.open(newline="") as fh:
        reader = csv.reader(fh)
        header = next(reader, None)
        if header is None or [h.strip() for h in header] != columns:
            raise MarketDataError(f"{path}:1: expected header {','.join(columns)}, got {header}")
        rows = []
        prev = None
        for lineno, row in enumerate(reader, start=2):
            if not row or all(not cell.strip() for cell in row):
                continue
            if len(row) != len(columns):
                raise MarketDataError(f"{path}:{lineno}: expected {len(columns)} fields, got {len(row)}")
            month = row[0].strip()
            if not _MONTH.match(month):
                raise MarketDataError(f"{path}:{lineno}: month {month!r} is not YYYY-MM")
            if prev is not None and month <= prev:
                raise MarketDataError(f"{path}:{lineno}: month {month} does not follow {prev}")
            prev = month
            values = [_parse_positive(cell.strip(), path, lineno, col) for cell, col in zip(row[1:], columns[1:])]
            rows.append((month, *values))
    return rows


def read_shiller(path) -> tuple[MarketSeries, MarketSeries]:
    """Price and (annualised) dividend series from a Shiller-format file."""
    rows = _read_rows(path, ["month", "price", "dividend"])
    prices = MarketSeries("price", tuple((m, p) for m, p, _ in rows))
    dividends = MarketSeries("dividend", tuple((m, d) for m, _, d in rows))
    return prices, dividends


def read_index(path, label: str | None = None) -> MarketSeries:
    rows = _read_rows(path, ["month", "close"])
    return MarketSeries(label or Path(path).stem, tuple(rows))


def trailing_pd(prices: MarketSeries, dividends: MarketSeries, window: int = 12) -> MarketSeries:
    """Price over the trailing ``window``-month dividend.

    Each monthly value of an annualised dividend column is one twelfth of a
    year's payout, so the trailing-year dividend is the window mean.  A month
    is emitted only when the preceding ``window`` months are all present.
    """
    div = dividends.as_dict()
    out = []
    for month, price in prices.observations:
        months = [month]
        for _ in range(window - 1):
            months.insert(0, _prev_month(months[0]))
        if all(m in div for m in months):
            trailing = sum(div[m] for m in months) / window
            out.append((month, price / trailing))
    return MarketSeries("pd", tuple(out))


def _prev_month(month: str) -> str:
    y, m = int(month[:4]), int(month[5:])
    y, m = (y - 1, 12) if m == 1 else (y, m - 1)
    return f"{y:04d}-{m:02d}"


def rebased_ratio(numerator: MarketSeries, denominator: MarketSeries, base_month: str = "2015-01") -> MarketSeries:
    """numerator / denominator on common months, scaled to 100 at ``base_month``."""
    den = denominator.as_dict()
    common = [(m, v / den[m]) for m, v in numerator.observations if m in den]
    base = dict(common).get(base_month)
    if base is None:
        raise RebaseError(f"rebase month {base_month} missing from the overlap of "
                          f"{numerator.label} and {denominator.label}")
    return MarketSeries("ratio_rebased", tuple((m, 100.0 * r / base) for m, r in common))
