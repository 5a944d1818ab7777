"""Cleaning raw return and price panels.

Equity panels: drop days where more than 10% of assets print zero
returns, drop assets that are zero more than half the time, convert to
market-excess returns (unit beta), winsorize at +-0.15.  Futures
panels: the same day rule on zero prices, an absolute zero-day count
per contract, forward- then backward-fill, log-returns, then the
equity steps.

Run: python demos/06_preprocessing.py
"""

import numpy as np

from leadlag import PreprocessConfig, TimeSeriesPanel, preprocess_equity, preprocess_futures

rng = np.random.default_rng(11)
cfg = PreprocessConfig(market_column="SPX")

# -- equity returns with placeholder zeros and one broken asset --------------
n_assets, T = 10, 30
values = rng.uniform(-0.05, 0.05, (n_assets + 1, T))
values[0] = rng.uniform(-0.01, 0.01, T)        # the market index
values[3] = 0.0                                 # a dead ticker: all zeros
values[1:, 12] = 0.0                            # a bad day: everyone zero
values[5, 4] = 0.45                             # a fat-fingered print
ids = ["SPX"] + [f"EQ{i:02d}" for i in range(n_assets)]
dates = [f"2020-{1 + t // 28:02d}-{1 + t % 28:02d}" for t in range(T)]

res = preprocess_equity(TimeSeriesPanel(ids, dates, values), cfg)
print("equity cleaning:")
print(f"  dropped days   : {res.dropped_dates}")
print(f"  dropped assets : {res.dropped_assets}")
print(f"  output shape   : {res.panel.n} assets x {res.panel.T} days")
print(f"  value range    : [{res.panel.values.min():+.3f}, {res.panel.values.max():+.3f}]"
      f"  (winsorized at +-{cfg.winsor_bound})")

# -- futures prices with zero placeholders ------------------------------------
# ten contracts so a single zero print (10%) does not trip the day rule
prices = np.cumprod(1 + rng.uniform(-0.01, 0.01, (11, T)), axis=1) * 100
prices[0] = 100.0                               # benchmark column
prices[2, :3] = 0.0                             # late listing: leading zeros
prices[4, 15] = 0.0                             # one missing print
fids = ["SPX"] + [f"FUT{i}" for i in range(10)]

res = preprocess_futures(TimeSeriesPanel(fids, dates, prices), cfg)
print("\nfutures cleaning:")
print(f"  output shape   : {res.panel.n} contracts x {res.panel.T} days of log-returns")
print(f"  FUT1 first returns: {np.round(res.panel.values[1, :4], 4).tolist()}"
      f"  (leading zeros backfilled, so the first returns are 0)")
print(f"  all values finite and inside +-{cfg.winsor_bound}: "
      f"{bool(np.isfinite(res.panel.values).all() and (np.abs(res.panel.values) <= 0.15).all())}")
