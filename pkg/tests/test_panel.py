import json
import math

import numpy as np
import pytest

from leadlag.errors import (
    AllZeroAsset,
    DuplicateDate,
    EmptyAfterFilter,
    MarketColumnMissing,
    NonMonotoneDates,
    ParseError,
)
from leadlag.panel import (
    PreprocessConfig,
    TimeSeriesPanel,
    load_csv,
    preprocess_equity,
    preprocess_futures,
    write_csv,
    write_sidecar,
)

CFG = PreprocessConfig(market_column="MKT")


def make_panel(values, ids=None, dates=None):
    values = np.asarray(values, dtype=np.float64)
    n, T = values.shape
    return TimeSeriesPanel(
        asset_ids=ids or [f"a{i}" for i in range(n)],
        dates=dates or [f"2020-01-{d + 1:02d}" for d in range(T)],
        values=values,
    )


# -- csv io --------------------------------------------------------------------

def test_load_csv_well_formed(tmp_path):
    path = tmp_path / "p.csv"
    path.write_text("date,x,y\n2020-01-01,0.1,-0.2\n2020-01-02,0.3,0.4\n2020-01-03,,1.5\n")
    panel = load_csv(path)
    assert panel.asset_ids == ["x", "y"]
    assert panel.n == 2 and panel.T == 3
    assert panel.values[0, 0] == 0.1 and panel.values[1, 2] == 1.5
    assert math.isnan(panel.values[0, 2])  # gap, not zero


def test_load_csv_parse_error_names_cell(tmp_path):
    path = tmp_path / "p.csv"
    path.write_text("date,x,y\n2020-01-01,0.1,oops\n")
    with pytest.raises(ParseError, match="row 2, column 3"):
        load_csv(path)


def test_load_csv_date_errors(tmp_path):
    dup = tmp_path / "dup.csv"
    dup.write_text("date,x\n2020-01-01,1\n2020-01-01,2\n")
    with pytest.raises(DuplicateDate):
        load_csv(dup)
    rev = tmp_path / "rev.csv"
    rev.write_text("date,x\n2020-01-02,1\n2020-01-01,2\n")
    with pytest.raises(NonMonotoneDates):
        load_csv(rev)


def test_csv_round_trip_identical(tmp_path):
    rng = np.random.default_rng(1)
    values = rng.standard_normal((3, 5))
    values[1, 2] = np.nan
    panel = make_panel(values)
    path = tmp_path / "p.csv"
    write_csv(panel, path)
    back = load_csv(path)
    assert back.asset_ids == panel.asset_ids
    assert back.dates == panel.dates
    assert np.array_equal(back.values, panel.values, equal_nan=True)
    write_csv(back, tmp_path / "q.csv")
    assert (tmp_path / "q.csv").read_bytes() == path.read_bytes()


# -- equity rules --------------------------------------------------------------

def test_equity_no_op_when_clean():
    rng = np.random.default_rng(2)
    values = rng.uniform(-0.1, 0.1, (4, 10))
    values[0] = 0.0  # market row, zero return
    res = preprocess_equity(make_panel(values, ids=["MKT", "b", "c", "d"]), CFG)
    assert res.panel.asset_ids == ["b", "c", "d"]
    assert not res.dropped_dates and not res.dropped_assets
    assert np.array_equal(res.panel.values, values[1:])


def test_equity_day_drop_rule():
    # 10 assets, day 3 has 2 zeros (20% > 10%) -> dropped
    rng = np.random.default_rng(3)
    values = rng.uniform(0.01, 0.1, (11, 6))
    values[0] = 0.0
    values[1, 3] = 0.0
    values[2, 3] = 0.0
    res = preprocess_equity(make_panel(values, ids=["MKT"] + [f"a{i}" for i in range(10)]), CFG)
    assert len(res.dropped_dates) == 1
    assert res.panel.T == 5
    assert res.dropped_dates[0] == "2020-01-04"


def test_equity_asset_drop_rule():
    # one of ten assets zero on 60% of days (> 50%) -> dropped; a single
    # zero per day is exactly 10%, so no day trips the day rule first
    rng = np.random.default_rng(4)
    values = rng.uniform(0.01, 0.1, (11, 10))
    values[0] = 0.0
    values[1, :6] = 0.0
    ids = ["MKT", "bad"] + [f"a{i}" for i in range(9)]
    res = preprocess_equity(make_panel(values, ids=ids), CFG)
    assert not res.dropped_dates
    assert res.dropped_assets == ["bad"]
    assert res.panel.asset_ids == ids[2:]


def test_equity_excess_and_winsorization():
    values = np.array([
        [0.01, -0.02],   # market
        [0.31, 0.08],    # 0.30 excess -> clamped to 0.15
        [-0.29, 0.01],   # -0.30 excess -> clamped to -0.15
    ])
    res = preprocess_equity(make_panel(values, ids=["MKT", "u", "v"]), CFG)
    assert res.panel.values[0, 0] == 0.15
    assert res.panel.values[1, 0] == -0.15
    assert res.panel.values[0, 1] == pytest.approx(0.10)
    assert np.all(np.abs(res.panel.values) <= 0.15)


def test_equity_gaps_count_as_zero_and_become_zero_raw():
    values = np.array([
        [0.0, 0.0, 0.0],
        [np.nan, 0.02, 0.03],
        [0.01, 0.02, 0.05],
        [0.04, 0.01, 0.02],
        [0.02, 0.03, 0.01],
        [0.01, 0.04, 0.02],
        [0.03, 0.01, 0.04],
        [0.02, 0.02, 0.03],
        [0.05, 0.01, 0.01],
        [0.01, 0.03, 0.02],
        [0.02, 0.04, 0.05],
    ])
    res = preprocess_equity(make_panel(values, ids=["MKT"] + [f"a{i}" for i in range(10)]), CFG)
    # 1 of 10 assets zero-ish on day 1: 10% is not > 10%, day kept;
    # the gap becomes a 0.0 raw return minus a zero market return
    assert res.panel.T == 3
    assert res.panel.values[0, 0] == 0.0


def test_equity_idempotent_with_zero_market_reinjected():
    rng = np.random.default_rng(5)
    values = rng.uniform(-0.4, 0.4, (6, 30))
    res1 = preprocess_equity(make_panel(values, ids=["MKT"] + [f"a{i}" for i in range(5)]), CFG)
    again = np.vstack([np.zeros(res1.panel.T), res1.panel.values])
    res2 = preprocess_equity(
        TimeSeriesPanel(["MKT"] + res1.panel.asset_ids, res1.panel.dates, again), CFG
    )
    assert np.array_equal(res2.panel.values, res1.panel.values)
    assert res2.panel.dates == res1.panel.dates


def test_equity_errors():
    with pytest.raises(MarketColumnMissing):
        preprocess_equity(make_panel(np.zeros((2, 3))), CFG)
    all_zero = make_panel(np.zeros((3, 4)), ids=["MKT", "a", "b"])
    with pytest.raises(EmptyAfterFilter):
        preprocess_equity(all_zero, CFG)


# -- futures rules ---------------------------------------------------------------

def futures_cfg(**kw):
    return PreprocessConfig(market_column="MKT", **kw)


def test_futures_constant_prices_zero_returns():
    values = np.vstack([np.full(5, 50.0), np.full(5, 10.0), np.full(5, 20.0)])
    res = preprocess_futures(make_panel(values, ids=["MKT", "f1", "f2"]), futures_cfg())
    assert np.array_equal(res.panel.values, np.zeros((2, 4)))


def test_futures_interior_zero_forward_filled():
    values = np.array([
        [50.0, 50.0, 50.0, 50.0],
        [10.0, 0.0, 10.0, 10.0],   # interior zero between 10s -> filled to 10
        [20.0, 21.0, 22.0, 23.0],
        [30.0, 31.0, 32.0, 33.0],
        [40.0, 41.0, 42.0, 43.0],
        [11.0, 12.0, 13.0, 14.0],
        [21.0, 22.0, 23.0, 24.0],
        [31.0, 32.0, 33.0, 34.0],
        [41.0, 42.0, 43.0, 44.0],
        [12.0, 13.0, 14.0, 15.0],
        [22.0, 23.0, 24.0, 25.0],
    ])
    res = preprocess_futures(
        make_panel(values, ids=["MKT"] + [f"f{i}" for i in range(10)]), futures_cfg()
    )
    assert np.array_equal(res.panel.values[0], np.zeros(3))


def test_futures_leading_zeros_backward_filled():
    values = np.array([
        [50.0, 50.0, 50.0, 50.0],
        [0.0, 0.0, 10.0, 11.0],    # leading zeros -> backfilled from 10
        [20.0, 21.0, 22.0, 23.0],
        [30.0, 31.0, 32.0, 33.0],
        [40.0, 41.0, 42.0, 43.0],
        [11.0, 12.0, 13.0, 14.0],
        [21.0, 22.0, 23.0, 24.0],
        [31.0, 32.0, 33.0, 34.0],
        [41.0, 42.0, 43.0, 44.0],
        [12.0, 13.0, 14.0, 15.0],
        [22.0, 23.0, 24.0, 25.0],
    ])
    res = preprocess_futures(
        make_panel(values, ids=["MKT"] + [f"f{i}" for i in range(10)]), futures_cfg()
    )
    assert res.panel.values[0, 0] == 0.0  # ln(10/10)
    assert res.panel.values[0, 1] == 0.0
    assert res.panel.values[0, 2] == pytest.approx(math.log(11 / 10))


def test_futures_zero_day_count_drop():
    rng = np.random.default_rng(6)
    values = rng.uniform(10, 20, (4, 12))
    values[1, :5] = 0.0  # 5 zero days > threshold 4 -> dropped
    res = preprocess_futures(
        make_panel(values, ids=["MKT", "bad", "ok1", "ok2"]),
        futures_cfg(futures_zero_day_count=4, day_zero_frac=0.9),
    )
    assert res.dropped_assets == ["bad"]
    assert res.panel.asset_ids == ["ok1", "ok2"]


def test_futures_all_zero_asset():
    values = np.vstack([np.full(8, 50.0), np.zeros(8), np.full(8, 30.0)])
    with pytest.raises(AllZeroAsset):
        preprocess_futures(
            make_panel(values, ids=["MKT", "dead", "ok"]),
            futures_cfg(day_zero_frac=0.9, futures_zero_day_count=100),
        )


def test_futures_output_winsorized():
    values = np.array([
        [50.0, 50.0],
        [10.0, 30.0],   # huge log return -> clamped
        [20.0, 20.4],
    ])
    res = preprocess_futures(
        make_panel(values, ids=["MKT", "jump", "calm"]), futures_cfg(day_zero_frac=0.95)
    )
    assert res.panel.values[0, 0] == 0.15
    assert np.all(np.abs(res.panel.values) <= 0.15)


# -- sidecar -------------------------------------------------------------------

def test_sidecar_metadata(tmp_path):
    rng = np.random.default_rng(7)
    values = rng.uniform(-0.05, 0.05, (3, 6))
    values[0] = 0.0
    res = preprocess_equity(make_panel(values, ids=["MKT", "a", "b"]), CFG)
    out = tmp_path / "panel.meta.json"
    write_sidecar(res, CFG, out)
    meta = json.loads(out.read_text())
    assert meta["asset_ids"] == ["a", "b"]
    assert meta["preprocessing"]["winsor_bound"] == 0.15
    assert meta["preprocessing"]["dropped_assets"] == []
    assert meta["date_range"] == ["2020-01-01", "2020-01-06"]
