import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from leadlag.dtw import (
    dtw,
    dtw_cost,
    pairwise_distance_matrix,
    point_distance,
    vector_distance,
)
from leadlag.errors import BandInfeasible, EmptySequence, LengthMismatch, ZeroVector

from _oracles import enum_dtw_min_cost, path_cost, path_is_admissible


@pytest.mark.parametrize("a,b,expected", [(3, 3, 0), (1, 3, 4), (-0.5, 0.5, 1)])
def test_point_distance(a, b, expected):
    assert point_distance(a, b) == expected


def test_identical_series_zero_cost_diagonal_path():
    cost, path = dtw([1, 2, 3], [1, 2, 3])
    assert cost == 0.0
    assert path.pairs.tolist() == [[1, 1], [2, 2], [3, 3]]


def test_small_shifted_pair_matches_enumeration():
    a, b = [0.0, 1.0, 2.0], [1.0, 2.0, 3.0]
    cost, path = dtw(a, b)
    assert cost == enum_dtw_min_cost(a, b) == 2.0
    assert path.pairs.tolist() == [[1, 1], [2, 1], [3, 2], [3, 3]]
    assert path_cost(path.pairs.tolist(), a, b) == cost


def test_window_zero_is_squared_euclidean_exactly():
    rng = np.random.default_rng(10)
    for _ in range(50):
        T = int(rng.integers(1, 40))
        a, b = rng.uniform(-2, 2, T), rng.uniform(-2, 2, T)
        cost, path = dtw(a, b, window=0)
        s = 0.0
        for x, y in zip(a.tolist(), b.tolist()):
            t = x - y
            s += t * t
        assert cost - s == 0.0
        assert len(path) == T


def test_errors():
    with pytest.raises(EmptySequence):
        dtw([], [1.0])
    with pytest.raises(BandInfeasible):
        dtw([1, 2, 3, 4, 5], [1.0], window=2)
    with pytest.raises(ValueError):
        dtw([1, np.nan], [1, 2])


@settings(max_examples=200, deadline=None)
@given(
    a=st.lists(st.floats(-2, 2), min_size=1, max_size=8),
    b=st.lists(st.floats(-2, 2), min_size=1, max_size=8),
    wsel=st.integers(0, 3),
)
def test_path_invariants_and_optimality(a, b, wsel):
    window = [0, 1, 2, None][wsel]
    n, m = len(a), len(b)
    if window is not None and window < abs(n - m):
        window = abs(n - m)
    cost, path = dtw(a, b, window)
    pairs = [tuple(p) for p in path.pairs.tolist()]
    assert path_is_admissible(pairs, n, m, window)
    assert path_cost(pairs, a, b) == cost
    assert cost == enum_dtw_min_cost(a, b, window)


def test_band_monotonicity():
    rng = np.random.default_rng(3)
    for _ in range(25):
        T = int(rng.integers(2, 25))
        a, b = rng.standard_normal(T), rng.standard_normal(T)
        costs = [dtw_cost(a, b, window=w) for w in (0, 1, 2, 5, None)]
        assert all(c1 >= c2 for c1, c2 in zip(costs, costs[1:]))


def test_cost_symmetry():
    rng = np.random.default_rng(4)
    for _ in range(25):
        a = rng.standard_normal(int(rng.integers(1, 20)))
        b = rng.standard_normal(int(rng.integers(1, 20)))
        w = None if rng.integers(0, 2) else int(abs(len(a) - len(b)) + rng.integers(0, 4))
        c_ab, p_ab = dtw(a, b, w)
        c_ba, p_ba = dtw(b, a, w)
        assert c_ab == c_ba
        # the swapped path transposes to an admissible path of equal cost
        transposed = [(j, i) for i, j in p_ba.pairs.tolist()]
        assert path_cost(transposed, a, b) == c_ab


def test_shift_capture_zero_cost():
    rng = np.random.default_rng(5)
    x = rng.standard_normal(60)
    for lag in (1, 3, 5):
        delayed = np.concatenate([np.full(lag, x[0]), x])  # length 60 + lag
        assert dtw_cost(x, delayed, window=lag) == 0.0
        assert dtw_cost(x, delayed) == 0.0


def test_sqrt_flag_reports_root_but_path_keeps_raw():
    a, b = [0.0, 1.0, 2.0], [1.0, 2.0, 3.0]
    cost, path = dtw(a, b, sqrt=True)
    assert cost == math.sqrt(2.0)
    assert path.cost == 2.0


def test_vector_distance_identity_and_orthogonal():
    v = [1.0, 2.0, -1.0]
    for metric in ("euclidean", "manhattan", "cosine"):
        assert vector_distance(v, v, metric) == pytest.approx(0.0, abs=1e-15)
    assert vector_distance([1, 0], [0, 1], "euclidean") == pytest.approx(math.sqrt(2))
    assert vector_distance([1, 0], [0, 1], "manhattan") == 2
    assert vector_distance([1, 0], [0, 1], "cosine") == 1


def test_vector_distance_against_scalar_loops():
    rng = np.random.default_rng(6)
    a, b = rng.standard_normal(17), rng.standard_normal(17)
    eu = math.sqrt(sum((x - y) * (x - y) for x, y in zip(a, b)))
    ma = sum(abs(x - y) for x, y in zip(a, b))
    dot = sum(x * y for x, y in zip(a, b))
    co = 1 - dot / (math.sqrt(sum(x * x for x in a)) * math.sqrt(sum(y * y for y in b)))
    assert vector_distance(a, b, "euclidean") == pytest.approx(eu, rel=1e-12)
    assert vector_distance(a, b, "manhattan") == pytest.approx(ma, rel=1e-12)
    assert vector_distance(a, b, "cosine") == pytest.approx(co, rel=1e-12)


def test_vector_distance_errors():
    with pytest.raises(LengthMismatch):
        vector_distance([1, 2], [1, 2, 3], "euclidean")
    with pytest.raises(ZeroVector):
        vector_distance([0, 0], [1, 2], "cosine")
    with pytest.raises(ValueError):
        vector_distance([1], [1], "chebyshev")


def test_pairwise_identical_series():
    D = pairwise_distance_matrix(np.array([[1.0, 2.0, 3.0]] * 2), "dtw")
    assert np.array_equal(D, np.zeros((2, 2)))


def test_pairwise_matches_per_pair_recomputation():
    rng = np.random.default_rng(7)
    X = rng.standard_normal((3, 12))
    D = pairwise_distance_matrix(X, "euclidean")
    for i in range(3):
        for j in range(3):
            expect = 0.0 if i == j else vector_distance(X[i], X[j], "euclidean")
            assert D[i, j] == expect
    Ddtw = pairwise_distance_matrix(X, "dtw", window=2)
    for i in range(3):
        for j in range(i + 1, 3):
            assert Ddtw[i, j] == dtw_cost(X[i], X[j], window=2)


def test_pairwise_rejects_empty_panel():
    with pytest.raises(EmptySequence):
        pairwise_distance_matrix(np.empty((3, 0)), "dtw")
    with pytest.raises(ValueError):
        pairwise_distance_matrix(np.zeros((1, 5)), "dtw")


def test_pairwise_symmetry_zero_diagonal():
    rng = np.random.default_rng(8)
    X = rng.standard_normal((6, 20))
    for metric in ("dtw", "euclidean", "manhattan", "cosine"):
        D = pairwise_distance_matrix(X, metric)
        assert np.array_equal(D, D.T)
        assert np.array_equal(np.diag(D), np.zeros(6))
        assert (D >= 0).all()
