"""Return panels: wide-CSV io and the equity/futures cleaning pipeline.

A panel is an (n, T) matrix of returns with one row per asset and one
column per date.  Wide CSV layout: header row ``date,<asset>,...``,
one row per date, empty cells are gaps (kept as NaN on load, never
silently zeroed).  Dates are opaque strings compared lexicographically,
so ISO dates or fixed-width indices sort correctly.

Cleaning follows the two-threshold zero-drop rules (days first, then
assets), market-excess conversion against a designated benchmark
column, and winsorization, in that order.  Gaps count as zero returns
for the drop rules and become literal zeros afterwards: the zeros in
the source data are placeholders, so the rules use exact 0.0 equality.
"""

from __future__ import annotations

import csv
import json
import math
from dataclasses import dataclass, field

import numpy as np

from .errors import (
    AllZeroAsset,
    DuplicateDate,
    EmptyAfterFilter,
    MarketColumnMissing,
    NonMonotoneDates,
    ParseError,
)


@dataclass
class TimeSeriesPanel:
    """n series x T dates of real values (returns, or prices before ingest)."""

    asset_ids: list[str]
    dates: list[str]
    values: np.ndarray

    @property
    def n(self) -> int:
        return self.values.shape[0]

    @property
    def T(self) -> int:
        return self.values.shape[1]

    def require_clean(self) -> None:
        """Assert the invariants of a preprocessed panel."""
        if self.n < 2:
            raise EmptyAfterFilter(f"panel has {self.n} assets, need >= 2")
        if self.T < 1:
            raise EmptyAfterFilter("panel has no dates")
        if not np.all(np.isfinite(self.values)):
            raise ValueError("panel contains non-finite values")


@dataclass
class PreprocessConfig:
    day_zero_frac: float = 0.10
    asset_zero_frac: float = 0.50
    futures_zero_day_count: int = 160
    winsor_bound: float = 0.15
    market_column: str = "MKT"


@dataclass
class PreprocessResult:
    panel: TimeSeriesPanel
    dropped_dates: list[str] = field(default_factory=list)
    dropped_assets: list[str] = field(default_factory=list)


def load_csv(path) -> TimeSeriesPanel:
    """Parse a wide CSV; gaps stay NaN, bad cells raise with their location."""
    with open(path, "r", encoding="utf-8", newline="") as fh:
        rows = list(csv.reader(fh))
    if not rows or len(rows[0]) < 2:
        raise ParseError(f"{path}: need a header row with a date column and >= 1 asset")
    ids = [c.strip() for c in rows[0][1:]]
    dates: list[str] = []
    data: list[list[float]] = []
    for r, row in enumerate(rows[1:], start=2):
        if len(row) != len(ids) + 1:
            raise ParseError(f"{path}: row {r} has {len(row)} cells, expected {len(ids) + 1}")
        date = row[0].strip()
        if dates:
            # strict increase also rules out any non-adjacent duplicate
            if date == dates[-1]:
                raise DuplicateDate(f"{path}: row {r}: date {date!r} repeats")
            if date < dates[-1]:
                raise NonMonotoneDates(f"{path}: row {r}: {date!r} < {dates[-1]!r}")
        dates.append(date)
        vals = []
        for c, cell in enumerate(row[1:], start=2):
            cell = cell.strip()
            if cell == "":
                vals.append(math.nan)
                continue
            try:
                vals.append(float(cell))
            except ValueError:
                raise ParseError(f"{path}: row {r}, column {c}: {cell!r} is not a number") from None
        data.append(vals)
    values = np.asarray(data, dtype=np.float64).T if data else np.empty((len(ids), 0))
    return TimeSeriesPanel(asset_ids=ids, dates=dates, values=values)


def write_csv(panel: TimeSeriesPanel, path) -> None:
    """Write a wide CSV; NaN gaps become empty cells. Round-trips exactly."""
    with open(path, "w", encoding="utf-8", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(["date"] + panel.asset_ids)
        for t, date in enumerate(panel.dates):
            cells = [
                "" if math.isnan(v) else repr(float(v)) for v in panel.values[:, t]
            ]
            w.writerow([date] + cells)


def write_sidecar(result: PreprocessResult, cfg: PreprocessConfig, path) -> None:
    """JSON metadata next to a preprocessed panel: ids, range, provenance."""
    panel = result.panel
    payload = {
        "asset_ids": panel.asset_ids,
        "date_range": [panel.dates[0], panel.dates[-1]] if panel.dates else [],
        "preprocessing": {
            "day_zero_frac": cfg.day_zero_frac,
            "asset_zero_frac": cfg.asset_zero_frac,
            "futures_zero_day_count": cfg.futures_zero_day_count,
            "winsor_bound": cfg.winsor_bound,
            "market_column": cfg.market_column,
            "dropped_dates": result.dropped_dates,
            "dropped_assets": result.dropped_assets,
        },
    }
    with open(path, "w", encoding="utf-8", newline="") as fh:
        json.dump(payload, fh, indent=2)
        fh.write("\n")


def _market_index(panel: TimeSeriesPanel, cfg: PreprocessConfig) -> int:
    try:
        return panel.asset_ids.index(cfg.market_column)
    except ValueError:
        raise MarketColumnMissing(
            f"market column {cfg.market_column!r} not in panel"
        ) from None


def _excess_and_winsorize(values: np.ndarray, ids: list[str], mkt: int,
                          bound: float) -> tuple[np.ndarray, list[str]]:
    """Subtract the market row, drop it, clamp to [-bound, bound]."""
    filled = np.where(np.isnan(values), 0.0, values)
    excess = filled - filled[mkt][None, :]
    keep = np.ones(values.shape[0], dtype=bool)
    keep[mkt] = False
    out = np.clip(excess[keep], -bound, bound)
    out_ids = [i for k, i in zip(keep, ids) if k]
    return out, out_ids


def preprocess_equity(raw: TimeSeriesPanel, cfg: PreprocessConfig) -> PreprocessResult:
    """Zero-drop rules, market-excess conversion, winsorization.

    Drops days where more than ``day_zero_frac`` of the non-market
    assets have zero (or missing) returns, then assets with more than
    ``asset_zero_frac`` zero days; subtracts the market column from
    every asset (unit market beta) and removes it; finally clamps to
    +-``winsor_bound``.
    """
    mkt = _market_index(raw, cfg)
    values = raw.values.copy()
    ids = list(raw.asset_ids)
    dates = list(raw.dates)

    zero = (values == 0.0) | np.isnan(values)
    others = np.ones(values.shape[0], dtype=bool)
    others[mkt] = False
    day_bad = zero[others].mean(axis=0) > cfg.day_zero_frac if values.shape[1] else np.zeros(0, bool)
    dropped_dates = [d for d, bad in zip(dates, day_bad) if bad]
    values = values[:, ~day_bad]
    dates = [d for d, bad in zip(dates, day_bad) if not bad]
    if not dates:
        raise EmptyAfterFilter("every day was dropped")

    zero = (values == 0.0) | np.isnan(values)
    asset_bad = zero.mean(axis=1) > cfg.asset_zero_frac
    asset_bad[mkt] = False
    dropped_assets = [i for i, bad in zip(ids, asset_bad) if bad]
    mkt -= int(asset_bad[:mkt].sum())
    values = values[~asset_bad]
    ids = [i for i, bad in zip(ids, asset_bad) if not bad]

    out, out_ids = _excess_and_winsorize(values, ids, mkt, cfg.winsor_bound)
    panel = TimeSeriesPanel(asset_ids=out_ids, dates=dates, values=out)
    panel.require_clean()
    return PreprocessResult(panel=panel, dropped_dates=dropped_dates,
                            dropped_assets=dropped_assets)


def _fill_zero_prices(prices: np.ndarray) -> np.ndarray:
    """Forward-fill then backward-fill zero (or missing) prices, per row."""
    out = prices.copy()
    n, T = out.shape
    for i in range(n):
        row = out[i]
        bad = (row == 0.0) | np.isnan(row)
        if bad.all():
            raise AllZeroAsset(f"series {i} has no positive price to fill from")
        last = math.nan
        for t in range(T):
            if bad[t]:
                row[t] = last
            else:
                last = row[t]
        nxt = math.nan
        for t in range(T - 1, -1, -1):
            if math.isnan(row[t]):
                row[t] = nxt
            else:
                nxt = row[t]
    return out


def preprocess_futures(raw: TimeSeriesPanel, cfg: PreprocessConfig) -> PreprocessResult:
    """Price-level cleaning, fill, log-returns, then the equity steps.

    Drops days where more than ``day_zero_frac`` of the non-market
    series have zero prices and series with more than
    ``futures_zero_day_count`` zero-price days (an absolute count);
    forward- then backward-fills remaining zeros; converts to
    log-returns; then applies the market-excess and winsorization steps.
    """
    mkt = _market_index(raw, cfg)
    values = raw.values.copy()
    ids = list(raw.asset_ids)
    dates = list(raw.dates)
    if np.nanmin(values) < 0:
        raise ValueError("futures preprocessing expects nonnegative prices")

    zero = (values == 0.0) | np.isnan(values)
    others = np.ones(values.shape[0], dtype=bool)
    others[mkt] = False
    day_bad = zero[others].mean(axis=0) > cfg.day_zero_frac
    dropped_dates = [d for d, bad in zip(dates, day_bad) if bad]
    values = values[:, ~day_bad]
    dates = [d for d, bad in zip(dates, day_bad) if not bad]
    if len(dates) < 2:
        raise EmptyAfterFilter("need at least two surviving days for returns")

    zero = (values == 0.0) | np.isnan(values)
    asset_bad = zero.sum(axis=1) > cfg.futures_zero_day_count
    asset_bad[mkt] = False
    dropped_assets = [i for i, bad in zip(ids, asset_bad) if bad]
    mkt -= int(asset_bad[:mkt].sum())
    values = values[~asset_bad]
    ids = [i for i, bad in zip(ids, asset_bad) if not bad]

    prices = _fill_zero_prices(values)
    rets = np.log(prices[:, 1:] / prices[:, :-1])
    dates = dates[1:]

    out, out_ids = _excess_and_winsorize(rets, ids, mkt, cfg.winsor_bound)
    panel = TimeSeriesPanel(asset_ids=out_ids, dates=dates, values=out)
    panel.require_clean()
    return PreprocessResult(panel=panel, dropped_dates=dropped_dates,
                            dropped_assets=dropped_assets)
