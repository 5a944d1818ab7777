"""Command-line front end: simulate | detect | backtest | evaluate.

Every workflow is a pure function of its input files, configuration and
seed: running the same command twice produces byte-identical outputs.
Options may come from a flat ``key = value`` config file (--config);
explicit command-line flags win over config values.  All outputs are
UTF-8 CSV/JSON with Unix newlines.
"""

from __future__ import annotations

import argparse
import csv
import json
import math
import sys
from pathlib import Path

import numpy as np

from .errors import LeadLagError
from .lagmatrix import DetectorConfig, detect, write_matrix_csv
from .panel import load_csv
from .strategy import (
    METRICS_COLUMNS,
    BacktestConfig,
    MetricsReport,
    compute_metrics,
    grid_run,
    read_pnl_csv,
    rowsum_rank,
    run_backtest,
    write_metrics_csv,
    write_pnl_csv,
)
from .synthetic import (
    generate,
    heterogeneous_spec,
    homogeneous_spec,
    sweep_sigma,
    sweep_window,
    write_sweep_csv,
)

SETTINGS = ("homogeneous", "heterogeneous_k2", "heterogeneous_k3")
DETECTORS = ("dtw_mode", "dtw_median", "ccf_auc")


def parse_config_file(path: str) -> dict[str, str]:
    """Flat ``key = value`` lines; '#' starts a comment; later keys win."""
    out: dict[str, str] = {}
    for lineno, line in enumerate(Path(path).read_text(encoding="utf-8").splitlines(), 1):
        line = line.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise LeadLagError(f"{path}:{lineno}: expected 'key = value', got {line!r}")
        key, value = line.split("=", 1)
        out[key.strip()] = value.strip()
    return out


def _merge(args: argparse.Namespace, defaults: dict) -> dict:
    """defaults < config file < explicit flags (flags parsed with default=None)."""
    merged = dict(defaults)
    if getattr(args, "config", None):
        cfg = parse_config_file(args.config)
        unknown = set(cfg) - set(defaults)
        if unknown:
            raise LeadLagError(f"unknown config keys: {sorted(unknown)}")
        merged.update(cfg)
    for key in defaults:
        val = getattr(args, key, None)
        if val is not None:
            merged[key] = val
    return merged


def _as_int(v, key: str) -> int:
    try:
        return int(v)
    except (TypeError, ValueError):
        raise LeadLagError(f"{key} must be an integer, got {v!r}") from None


def _as_float(v, key: str) -> float:
    try:
        return float(v)
    except (TypeError, ValueError):
        raise LeadLagError(f"{key} must be a number, got {v!r}") from None


def _as_window(v) -> int | None:
    if v in (None, "", "unbounded"):
        return None
    return _as_int(v, "window")


def _as_values(v, key: str) -> list[float]:
    if isinstance(v, (list, tuple)):
        return [float(x) for x in v]
    try:
        return [float(x) for x in str(v).split(",") if x.strip() != ""]
    except ValueError:
        raise LeadLagError(f"{key} must be a comma-separated number list, got {v!r}") from None


def _out_dir(merged: dict) -> Path:
    # the worker cap never affects results; current kernels are
    # single-threaded, so validating the cap is all that is needed
    if _as_int(merged["threads"], "threads") < 1:
        raise LeadLagError(f"threads must be >= 1, got {merged['threads']}")
    out = Path(merged["out"])
    out.mkdir(parents=True, exist_ok=True)
    return out


def _json_safe(x: float):
    if math.isinf(x):
        return "inf" if x > 0 else "-inf"
    return x


def _metrics_dict(m: MetricsReport) -> dict:
    return {k: _json_safe(v) for k, v in vars(m).items()}


# -- subcommands -------------------------------------------------------------

SIM_DEFAULTS = {
    "out": "out", "seed": 0, "threads": 1,
    "setting": "homogeneous", "n": 120, "t_len": 100, "sigma": 1.0,
    "sweep": "", "grid": "", "reps": 100,
    "detector": "dtw_mode", "k": 1, "window": "unbounded", "max_lag": 5,
}


def cmd_simulate(args: argparse.Namespace) -> list[Path]:
    cfg = _merge(args, SIM_DEFAULTS)
    out = _out_dir(cfg)
    seed = _as_int(cfg["seed"], "seed")
    n = _as_int(cfg["n"], "n")
    t_len = _as_int(cfg["t_len"], "t_len")
    sigma = _as_float(cfg["sigma"], "sigma")
    setting = cfg["setting"]
    if setting == "homogeneous":
        spec = homogeneous_spec(n=n, T=t_len, sigma=sigma, seed=seed)
    elif setting in ("heterogeneous_k2", "heterogeneous_k3"):
        spec = heterogeneous_spec(k=int(setting[-1]), n=n, T=t_len, sigma=sigma, seed=seed)
    else:
        raise LeadLagError(f"setting must be one of {SETTINGS}, got {setting!r}")

    if cfg["sweep"]:
        detector = DetectorConfig(
            method=cfg["detector"], k_clusters=_as_int(cfg["k"], "k"),
            window=_as_window(cfg["window"]), max_lag=_as_int(cfg["max_lag"], "max_lag"),
        )
        reps = _as_int(cfg["reps"], "reps")
        grid = _as_values(cfg["grid"], "grid")
        if not grid:
            raise LeadLagError("sweep mode needs a --grid value list")
        if cfg["sweep"] == "sigma":
            rows = sweep_sigma(spec, grid, detector, repetitions=reps, seed=seed)
        elif cfg["sweep"] == "window":
            rows = sweep_window(spec, [int(g) for g in grid], detector,
                                repetitions=reps, seed=seed)
        else:
            raise LeadLagError(f"sweep must be 'sigma' or 'window', got {cfg['sweep']!r}")
        path = out / "sweep.csv"
        write_sweep_csv(rows, path)
        return [path]

    sample = generate(spec)
    from .panel import write_csv

    panel_path = out / "panel.csv"
    psi_path = out / "psi.csv"
    write_csv(sample.panel, panel_path)
    write_matrix_csv(sample.psi, sample.panel.asset_ids, psi_path)
    return [panel_path, psi_path]


DETECT_DEFAULTS = {
    "out": "out", "seed": 0, "threads": 1, "panel": "",
    "detector": "dtw_mode", "k": 1, "window": "unbounded", "max_lag": 5,
}


def cmd_detect(args: argparse.Namespace) -> list[Path]:
    cfg = _merge(args, DETECT_DEFAULTS)
    if not cfg["panel"]:
        raise LeadLagError("detect needs --panel PATH")
    out = _out_dir(cfg)
    panel = load_csv(cfg["panel"])
    panel.require_clean()
    dcfg = DetectorConfig(
        method=cfg["detector"], k_clusters=_as_int(cfg["k"], "k"),
        window=_as_window(cfg["window"]), max_lag=_as_int(cfg["max_lag"], "max_lag"),
        seed=_as_int(cfg["seed"], "seed"),
    )
    assignment, gamma = detect(panel.values, dcfg)
    ranking = rowsum_rank(gamma)

    gamma_path = out / "gamma.csv"
    write_matrix_csv(gamma.values, panel.asset_ids, gamma_path)

    clusters_path = out / "clusters.csv"
    medoids = set(assignment.medoids or [])
    with open(clusters_path, "w", encoding="utf-8", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(["asset_id", "cluster", "is_medoid"])
        for i, name in enumerate(panel.asset_ids):
            w.writerow([name, str(int(assignment.labels[i])), str(int(i in medoids))])

    ranking_path = out / "ranking.csv"
    with open(ranking_path, "w", encoding="utf-8", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(["rank", "asset_id", "row_sum"])
        for r, idx in enumerate(ranking.order, start=1):
            w.writerow([str(r), panel.asset_ids[idx], repr(float(ranking.row_sums[idx]))])
    return [gamma_path, clusters_path, ranking_path]


BACKTEST_DEFAULTS = {
    "out": "out", "seed": 0, "threads": 1, "panel": "",
    "detector": "dtw_mode", "k": 1, "window": "unbounded", "max_lag": 5,
    "p": 1, "delta": 1, "alpha": 0.25, "l": 21, "h": 1, "sigma_target": 0.15,
}


def cmd_backtest(args: argparse.Namespace) -> list[Path]:
    cfg = _merge(args, BACKTEST_DEFAULTS)
    if not cfg["panel"]:
        raise LeadLagError("backtest needs --panel PATH")
    out = _out_dir(cfg)
    panel = load_csv(cfg["panel"])
    panel.require_clean()
    bcfg = BacktestConfig(
        p=_as_int(cfg["p"], "p"), delta=_as_int(cfg["delta"], "delta"),
        alpha=_as_float(cfg["alpha"], "alpha"), k_clusters=_as_int(cfg["k"], "k"),
        window=_as_window(cfg["window"]), l=_as_int(cfg["l"], "l"),
        h=_as_int(cfg["h"], "h"), sigma_target=_as_float(cfg["sigma_target"], "sigma_target"),
        detector=cfg["detector"], max_lag=_as_int(cfg["max_lag"], "max_lag"),
    )
    pnl_lag, pnl_lead = run_backtest(panel, bcfg)

    lag_path = out / "pnl_laggers.csv"
    lead_path = out / "pnl_leaders.csv"
    write_pnl_csv(pnl_lag, lag_path)
    write_pnl_csv(pnl_lead, lead_path)

    cum_path = out / "cumulative.csv"
    cum_lag = np.cumsum(pnl_lag.rescaled)
    cum_lead = np.cumsum(pnl_lead.rescaled)
    with open(cum_path, "w", encoding="utf-8", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(["date", "laggers", "leaders"])
        for d, a, b in zip(pnl_lag.dates, cum_lag, cum_lead):
            w.writerow([d, repr(float(a)), repr(float(b))])
    return [lag_path, lead_path, cum_path]


EVALUATE_DEFAULTS = {
    "out": "out", "seed": 0, "threads": 1, "panel": "", "pnl": "",
    "detector": "dtw_mode", "k": 1, "window": "unbounded", "max_lag": 5,
    "p": 1, "delta": 1, "alpha": 0.25, "l": 21, "h": 1, "sigma_target": 0.15,
    "grid_k": "",
}


def cmd_evaluate(args: argparse.Namespace) -> list[Path]:
    cfg = _merge(args, EVALUATE_DEFAULTS)
    out = _out_dir(cfg)

    if cfg["grid_k"]:
        if not cfg["panel"]:
            raise LeadLagError("grid mode needs --panel PATH")
        panel = load_csv(cfg["panel"])
        panel.require_clean()
        ks = [int(v) for v in _as_values(cfg["grid_k"], "grid_k")]
        rows, failures = grid_run(
            panel, detectors=[cfg["detector"]], ps=[_as_int(cfg["p"], "p")],
            deltas=[_as_int(cfg["delta"], "delta")],
            alphas=[_as_float(cfg["alpha"], "alpha")], ks=ks,
            l=_as_int(cfg["l"], "l"), h=_as_int(cfg["h"], "h"),
            window=_as_window(cfg["window"]), max_lag=_as_int(cfg["max_lag"], "max_lag"),
            sigma_target=_as_float(cfg["sigma_target"], "sigma_target"),
        )
        metrics_path = out / "metrics.csv"
        write_metrics_csv(rows, metrics_path)
        written = [metrics_path]
        if failures:
            fail_path = out / "failures.csv"
            with open(fail_path, "w", encoding="utf-8", newline="") as fh:
                w = csv.writer(fh, lineterminator="\n")
                w.writerow(["failure"])
                for f in failures:
                    w.writerow([f])
            raise PartialFailure(written + [fail_path])
        return written

    if not cfg["pnl"]:
        raise LeadLagError("evaluate needs --pnl PATH (or --grid-k for grid mode)")
    pnl_paths = [p for p in str(cfg["pnl"]).split(",") if p]
    records = []
    for path in pnl_paths:
        series = read_pnl_csv(path)
        stem = Path(path).stem
        strategy = "laggers" if "lagger" in stem else ("leaders" if "leader" in stem else stem)
        records.append((strategy, compute_metrics(series)))

    metrics_path = out / "metrics.csv"
    with open(metrics_path, "w", encoding="utf-8", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(METRICS_COLUMNS)
        for strategy, m in records:
            w.writerow([
                cfg["detector"], strategy, str(_as_int(cfg["p"], "p")),
                str(_as_int(cfg["delta"], "delta")),
                repr(_as_float(cfg["alpha"], "alpha")), str(_as_int(cfg["k"], "k")),
                repr(float(m.e_returns)), repr(float(m.volatility)),
                repr(float(m.downside_deviation)), repr(float(m.max_drawdown)),
                repr(float(m.sortino)), repr(float(m.calmar)),
                repr(float(m.hit_rate)), repr(float(m.avg_profit_over_avg_loss)),
                repr(float(m.pnl_per_trade)), repr(float(m.sharpe)),
                repr(float(m.p_value)),
            ])
    json_path = out / "metrics.json"
    payload = [{"strategy": s, **_metrics_dict(m)} for s, m in records]
    with open(json_path, "w", encoding="utf-8", newline="") as fh:
        json.dump(payload, fh, indent=2)
        fh.write("\n")
    return [metrics_path, json_path]


class PartialFailure(Exception):
    """Some grid cells failed; outputs plus a failures sidecar were written."""

    def __init__(self, written: list[Path]):
        super().__init__("some grid cells failed; see failures.csv")
        self.written = written


# -- argument parsing --------------------------------------------------------

def _add_common(sp: argparse.ArgumentParser) -> None:
    sp.add_argument("--config", help="flat key = value config file; flags win")
    sp.add_argument("--seed", type=int, help="master seed (default 0)")
    sp.add_argument("--threads", type=int,
                    help="worker-count cap; never affects results")
    sp.add_argument("--out", help="output directory (default ./out)")


def _add_detection(sp: argparse.ArgumentParser) -> None:
    sp.add_argument("--detector", choices=DETECTORS)
    sp.add_argument("--k", type=int, help="cluster count")
    sp.add_argument("--window", help="DTW band half-width or 'unbounded'")
    sp.add_argument("--max-lag", dest="max_lag", type=int, help="CCF lag horizon")


def _add_backtest(sp: argparse.ArgumentParser) -> None:
    sp.add_argument("--p", type=int, help="EWMA lookback days")
    sp.add_argument("--delta", type=int, help="holding horizon days")
    sp.add_argument("--alpha", type=float, help="leader fraction in (0, 1)")
    sp.add_argument("--l", type=int, help="detection window length")
    sp.add_argument("--h", type=int, help="window shift")
    sp.add_argument("--sigma-target", dest="sigma_target", type=float,
                    help="annualized volatility target")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="leadlag",
        description="Lead-lag detection, synthetic validation and backtesting.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    sp = sub.add_parser("simulate", help="generate synthetic panels or sweep tables")
    _add_common(sp)
    _add_detection(sp)
    sp.add_argument("--setting", choices=SETTINGS)
    sp.add_argument("--n", type=int, help="number of series")
    sp.add_argument("--t-len", dest="t_len", type=int, help="series length")
    sp.add_argument("--sigma", type=float, help="noise standard deviation")
    sp.add_argument("--sweep", choices=("sigma", "window"), help="sweep mode")
    sp.add_argument("--grid", help="comma-separated sweep grid values")
    sp.add_argument("--reps", type=int, help="replicates per grid point")
    sp.set_defaults(func=cmd_simulate)

    sp = sub.add_parser("detect", help="lead-lag matrix, clusters and ranking from a panel")
    _add_common(sp)
    _add_detection(sp)
    sp.add_argument("--panel", help="input panel CSV")
    sp.set_defaults(func=cmd_detect)

    sp = sub.add_parser("backtest", help="sliding-window strategy PnL from a panel")
    _add_common(sp)
    _add_detection(sp)
    _add_backtest(sp)
    sp.add_argument("--panel", help="input panel CSV")
    sp.set_defaults(func=cmd_backtest)

    sp = sub.add_parser("evaluate", help="metrics from PnL files, or a K-grid table")
    _add_common(sp)
    _add_detection(sp)
    _add_backtest(sp)
    sp.add_argument("--pnl", help="comma-separated PnL CSV paths")
    sp.add_argument("--panel", help="panel CSV (grid mode)")
    sp.add_argument("--grid-k", dest="grid_k", help="comma-separated K grid (grid mode)")
    sp.set_defaults(func=cmd_evaluate)
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        written = args.func(args)
    except PartialFailure as exc:
        for path in exc.written:
            print(path)
        print(f"error: {exc}", file=sys.stderr)
        return 1
    except (LeadLagError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    for path in written:
        print(path)
    return 0


if __name__ == "__main__":
    sys.exit(main())
