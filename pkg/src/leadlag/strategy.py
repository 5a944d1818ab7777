"""Lead-lag momentum backtest and the performance-metrics suite.

Each sliding window re-detects the lead-lag matrix, ranks series from
most leading to most lagging by row sums (orientation comes from the
lead-lag module's single sign-convention constant), splits them into
leader/lagger baskets, and trades the sign of an exponentially weighted
average of recent leader returns against the basket returns ``delta``
days ahead.  PnL series are rescaled to an annualized volatility
target; the metrics suite reports the standard annualized profitability,
risk and ratio measures plus a Sharpe-ratio significance p-value under
a standard-normal null that adjusts for skewness and kurtosis.

Conventions fixed here: standard deviations of PnL use ddof=1; downside
deviation is the annualized root mean square of the negative parts
(zero target return); maximum drawdown is the most negative
peak-to-trough move of the cumulative rescaled PnL curve starting from
a level of 0; ratios with a zero denominator report signed infinity,
never NaN; a zero forecast means a flat day (zero PnL contribution).
"""

from __future__ import annotations

import csv
import itertools
import logging
import math
from dataclasses import dataclass

import numpy as np

from .errors import (
    DegenerateSplit,
    InsufficientData,
    InsufficientHistory,
    ZeroVolatility,
)
from .lagmatrix import DetectorConfig, LeadLagMatrix, detect, leader_sign
from .panel import TimeSeriesPanel

log = logging.getLogger(__name__)

TRADING_DAYS = 252


@dataclass
class BacktestConfig:
    """Sliding-window backtest parameters.

    ``l`` is the detection window length in days, ``h`` the window
    shift, ``p`` the EWMA lookback, ``delta`` the holding horizon and
    ``alpha`` the leader fraction.  ``ewma_span`` defaults to ``p``.
    """

    p: int = 1
    delta: int = 1
    alpha: float = 0.25
    k_clusters: int = 1
    window: int | None = None
    l: int = 21
    h: int = 1
    sigma_target: float = 0.15
    detector: str = "dtw_mode"
    max_lag: int = 5
    ewma_span: int | None = None

    def validate(self) -> None:
        if self.p < 1 or self.l < self.p + 1:
            raise ValueError(f"need l >= p + 1 and p >= 1, got l={self.l}, p={self.p}")
        if self.delta < 1 or self.h < 1:
            raise ValueError("delta and h must be >= 1")
        if not 0.0 < self.alpha < 1.0:
            raise ValueError(f"alpha must lie in (0, 1), got {self.alpha}")


@dataclass
class Ranking:
    """Series indices from most leading to most lagging, plus row sums."""

    order: np.ndarray
    row_sums: np.ndarray


@dataclass
class PnLSeries:
    dates: list[str]
    raw: np.ndarray
    rescaled: np.ndarray


@dataclass
class MetricsReport:
    cumulative_pnl: float
    e_returns: float
    volatility: float
    downside_deviation: float
    max_drawdown: float
    sortino: float
    calmar: float
    hit_rate: float
    avg_profit_over_avg_loss: float
    pnl_per_trade: float
    sharpe: float
    p_value: float


def rowsum_rank(matrix: LeadLagMatrix) -> Ranking:
    """Rank series by row sums, most leading first, ties by lower index."""
    rs = matrix.values.sum(axis=1)
    key = -leader_sign(matrix.estimator) * rs
    order = np.argsort(key, kind="stable")
    return Ranking(order=order.astype(np.int64), row_sums=rs)


def split(ranking: Ranking, alpha: float) -> tuple[np.ndarray, np.ndarray]:
    """Top ceil(alpha * n) of the order as leaders, the rest as laggers."""
    if not 0.0 < alpha < 1.0:
        raise ValueError(f"alpha must lie in (0, 1), got {alpha}")
    n = ranking.order.shape[0]
    n_lead = math.ceil(alpha * n - 1e-9)
    leaders = ranking.order[:n_lead]
    laggers = ranking.order[n_lead:]
    if leaders.size == 0 or laggers.size == 0:
        raise DegenerateSplit(f"alpha={alpha} leaves an empty side for n={n}")
    return leaders, laggers


def ewma_signal(returns, p: int, span: int | None = None) -> float:
    """Exponentially weighted mean of the last p + 1 observations.

    The weight of the sample at age ``a`` is proportional to
    ``(1 - 2 / (span + 1)) ** a`` over ages 0..p, with span defaulting
    to ``p`` itself.
    """
    x = np.asarray(returns, dtype=np.float64)
    if p < 1:
        raise ValueError("p must be >= 1")
    if x.shape[0] < p + 1:
        raise InsufficientHistory(f"need {p + 1} observations, got {x.shape[0]}")
    s = p if span is None else span
    lam = 1.0 - 2.0 / (s + 1.0)
    w = lam ** np.arange(p + 1)
    tail = x[-(p + 1):][::-1]  # age order: today first
    return float((w * tail).sum() / w.sum())


def rescale_pnl(raw, sigma_target: float = 0.15) -> np.ndarray:
    """Scale a PnL series so its annualized volatility equals the target."""
    x = np.asarray(raw, dtype=np.float64)
    if x.shape[0] < 2:
        raise ZeroVolatility(f"need at least 2 PnL observations, got {x.shape[0]}")
    sd = float(x.std(ddof=1))
    if not sd > 0.0:
        raise ZeroVolatility("PnL standard deviation is zero")
    return x * (sigma_target / (sd * math.sqrt(TRADING_DAYS)))


def run_backtest(panel: TimeSeriesPanel, config: BacktestConfig
                 ) -> tuple[PnLSeries, PnLSeries]:
    """Sliding-window detection and trading over a panel.

    For each window end t (1-based, from l to T - delta, stepping h)
    the lead-lag matrix of the trailing l days is detected, series are
    ranked and split, and the sign of the EWMA of the leaders' average
    return over days t-p..t is traded against the average lagger and
    leader returns at day t + delta.  Returns the lagger-basket and
    leader-basket PnL series, both volatility-rescaled.
    """
    config.validate()
    X = panel.values
    n, T = X.shape
    if T < config.l + config.delta:
        raise InsufficientHistory(f"need T >= l + delta = {config.l + config.delta}, got {T}")
    dcfg = DetectorConfig(method=config.detector, k_clusters=config.k_clusters,
                          window=config.window, max_lag=config.max_lag)
    dates, raw_lag, raw_lead = [], [], []
    for end in range(config.l - 1, T - config.delta, config.h):
        win = X[:, end - config.l + 1:end + 1]
        _, gamma = detect(win, dcfg)
        ranking = rowsum_rank(gamma)
        try:
            leaders, laggers = split(ranking, config.alpha)
        except DegenerateSplit as exc:
            log.warning("window ending at %s skipped: %s", panel.dates[end], exc)
            continue
        lead_means = X[leaders, end - config.p:end + 1].mean(axis=0)
        sig = ewma_signal(lead_means, config.p, span=config.ewma_span)
        s = 0.0 if sig == 0.0 else math.copysign(1.0, sig)
        raw_lag.append(s * float(X[laggers, end + config.delta].mean()))
        raw_lead.append(s * float(X[leaders, end + config.delta].mean()))
        dates.append(panel.dates[end + config.delta])
    raw_lag = np.asarray(raw_lag)
    raw_lead = np.asarray(raw_lead)
    pnl_laggers = PnLSeries(dates, raw_lag, rescale_pnl(raw_lag, config.sigma_target))
    pnl_leaders = PnLSeries(dates, raw_lead, rescale_pnl(raw_lead, config.sigma_target))
    return pnl_laggers, pnl_leaders


def _skew_kurt(x: np.ndarray) -> tuple[float, float]:
    """Population skewness and raw (non-excess) kurtosis."""
    c = x - x.mean()
    m2 = float((c * c).mean())
    m3 = float((c ** 3).mean())
    m4 = float((c ** 4).mean())
    return m3 / m2 ** 1.5, m4 / m2 ** 2


def _ratio_or_inf(num: float, den: float) -> float:
    if den == 0.0:
        return math.copysign(math.inf, num) if num != 0.0 else math.inf
    return num / den


def compute_metrics(pnl) -> MetricsReport:
    """Annualized metrics suite over a (rescaled) daily PnL series.

    Accepts a :class:`PnLSeries` (uses its rescaled leg) or a plain
    array already expressed in rescaled terms.
    """
    x = pnl.rescaled if isinstance(pnl, PnLSeries) else np.asarray(pnl, dtype=np.float64)
    T = x.shape[0]
    if T < 2:
        raise InsufficientData(f"need at least 2 observations, got {T}")
    root_days = math.sqrt(TRADING_DAYS)
    avg = float(x.mean())
    sd = float(x.std(ddof=1))
    e_returns = avg * TRADING_DAYS
    volatility = sd * root_days
    downside = float(np.sqrt((np.minimum(x, 0.0) ** 2).mean())) * root_days

    curve = np.concatenate(([0.0], np.cumsum(x)))
    drawdowns = curve - np.maximum.accumulate(curve)
    max_drawdown = float(drawdowns.min())

    profits = x[x > 0.0]
    losses = x[x < 0.0]
    if profits.size == 0:
        apl = 0.0
    elif losses.size == 0:
        apl = math.inf
    else:
        apl = float(profits.mean()) / abs(float(losses.mean()))

    if sd > 0.0:
        sharpe = avg / sd * root_days
        sr = avg / sd  # per-period Sharpe inside the significance statistic
        g1, g2 = _skew_kurt(x)
        var_term = 1.0 - g1 * sr + (g2 - 1.0) / 4.0 * sr * sr
        if var_term <= 0.0:
            stat = math.inf
        else:
            stat = sr * math.sqrt(T - 1) / math.sqrt(var_term)
        p_value = math.erfc(abs(stat) / math.sqrt(2.0))
    else:
        sharpe = math.copysign(math.inf, avg) if avg != 0.0 else 0.0
        p_value = 0.0 if avg != 0.0 else 1.0

    return MetricsReport(
        cumulative_pnl=float(x.sum()),
        e_returns=e_returns,
        volatility=volatility,
        downside_deviation=downside,
        max_drawdown=max_drawdown,
        sortino=_ratio_or_inf(e_returns, downside),
        calmar=_ratio_or_inf(e_returns, abs(max_drawdown)),
        hit_rate=float((x > 0.0).mean()),
        avg_profit_over_avg_loss=apl,
        pnl_per_trade=avg * 1e4,
        sharpe=sharpe,
        p_value=p_value,
    )


# -- grids -------------------------------------------------------------------

@dataclass
class GridRow:
    detector: str
    strategy: str
    p: int
    delta: int
    alpha: float
    k: int
    metrics: MetricsReport


METRICS_COLUMNS = [
    "detector", "strategy", "p", "delta", "alpha", "K",
    "e_returns", "volatility", "downside_deviation", "max_drawdown",
    "sortino", "calmar", "hit_rate", "avg_profit_avg_loss",
    "pnl_per_trade", "sharpe", "p_value",
]


def grid_run(panel: TimeSeriesPanel, detectors, ps, deltas, alphas, ks, *,
             l: int = 21, h: int = 1, window: int | None = None,
             max_lag: int = 5, sigma_target: float = 0.15,
             ) -> tuple[list[GridRow], list[str]]:
    """Backtest + metrics for every grid cell and both strategies.

    Cell failures are recorded as strings and do not stop the run.
    """
    rows: list[GridRow] = []
    failures: list[str] = []
    for det, p, delta, alpha, k in itertools.product(detectors, ps, deltas, alphas, ks):
        cfg = BacktestConfig(p=p, delta=delta, alpha=alpha, k_clusters=k,
                             window=window, l=l, h=h, sigma_target=sigma_target,
                             detector=det, max_lag=max_lag)
        cell = f"detector={det} p={p} delta={delta} alpha={alpha} K={k}"
        try:
            pnl_lag, pnl_lead = run_backtest(panel, cfg)
            rows.append(GridRow(det, "laggers", p, delta, alpha, k,
                                compute_metrics(pnl_lag)))
            rows.append(GridRow(det, "leaders", p, delta, alpha, k,
                                compute_metrics(pnl_lead)))
        except Exception as exc:
            failures.append(f"{cell}: {exc}")
    return rows, failures


def _csv_num(x: float) -> str:
    return repr(float(x))


def write_metrics_csv(rows: list[GridRow], path) -> None:
    with open(path, "w", encoding="utf-8", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(METRICS_COLUMNS)
        for r in rows:
            m = r.metrics
            w.writerow([
                r.detector, r.strategy, str(r.p), str(r.delta),
                _csv_num(r.alpha), str(r.k),
                _csv_num(m.e_returns), _csv_num(m.volatility),
                _csv_num(m.downside_deviation), _csv_num(m.max_drawdown),
                _csv_num(m.sortino), _csv_num(m.calmar), _csv_num(m.hit_rate),
                _csv_num(m.avg_profit_over_avg_loss), _csv_num(m.pnl_per_trade),
                _csv_num(m.sharpe), _csv_num(m.p_value),
            ])


def write_pnl_csv(pnl: PnLSeries, path) -> None:
    with open(path, "w", encoding="utf-8", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(["date", "raw", "rescaled"])
        for d, r, s in zip(pnl.dates, pnl.raw, pnl.rescaled):
            w.writerow([d, repr(float(r)), repr(float(s))])


def read_pnl_csv(path) -> PnLSeries:
    with open(path, "r", encoding="utf-8", newline="") as fh:
        rows = list(csv.reader(fh))
    dates = [r[0] for r in rows[1:]]
    raw = np.array([float(r[1]) for r in rows[1:]])
    rescaled = np.array([float(r[2]) for r in rows[1:]])
    return PnLSeries(dates=dates, raw=raw, rescaled=rescaled)
