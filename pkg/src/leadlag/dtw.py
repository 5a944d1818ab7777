"""Banded dynamic time warping and classical vector distances.

The warping cost between two series is the accumulated sum of squared
pointwise differences along the optimal path.  An optional Sakoe-Chiba
band restricts the path to cells with ``|i - j| <= window``; out-of-band
cells hold an +inf sentinel and are never entered.  Costs are reported
raw by default (no square root) so that the window-0 case reduces
exactly to the squared Euclidean distance; pass ``sqrt=True`` for the
square-rooted headline value, a monotone transform that never changes
the optimal path.

Tie-breaking in the dynamic program and in backtracking is fixed:
diagonal predecessor first, then (i-1, j), then (i, j-1), which makes
returned paths deterministic.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from numba import njit

from .errors import BandInfeasible, EmptySequence, LengthMismatch, ZeroVector

VECTOR_METRICS = ("euclidean", "manhattan", "cosine")


@dataclass(frozen=True)
class WarpingPath:
    """Optimal alignment between two series.

    ``pairs`` is a (K, 2) int array of 1-based index pairs running from
    (1, 1) to (n, m); ``cost`` is the raw accumulated squared-distance
    cost of the path.
    """

    pairs: np.ndarray
    cost: float

    def __len__(self) -> int:
        return self.pairs.shape[0]


def point_distance(a: float, b: float) -> float:
    """Squared difference between two samples.

    Squares by multiplication: CPython's ``** 2`` routes through libm
    pow, which can be one ulp off the correctly rounded product.
    """
    d = a - b
    return d * d


@njit(cache=True)
def _accumulated_cost(a, b, band):  # pragma: no cover - exercised via dtw()
    """(n+1)x(m+1) cumulative cost matrix; band < 0 means unbounded.

    Pointwise distances are materialized before the DP pass so the
    accumulation is a plain add; fusing the square into the add (FMA)
    would round differently and break exact agreement with
    reference-order summation.
    """
    n = a.shape[0]
    m = b.shape[0]
    dmat = np.empty((n, m))
    for i in range(n):
        if band < 0:
            lo, hi = 0, m - 1
        else:
            lo = i - band if i - band > 0 else 0
            hi = i + band if i + band < m - 1 else m - 1
        for j in range(lo, hi + 1):
            t = a[i] - b[j]
            dmat[i, j] = t * t
    c = np.full((n + 1, m + 1), np.inf)
    c[0, 0] = 0.0
    for i in range(1, n + 1):
        if band < 0:
            lo, hi = 1, m
        else:
            lo = i - band if i - band > 1 else 1
            hi = i + band if i + band < m else m
        for j in range(lo, hi + 1):
            best = c[i - 1, j - 1]
            if c[i - 1, j] < best:
                best = c[i - 1, j]
            if c[i, j - 1] < best:
                best = c[i, j - 1]
            c[i, j] = dmat[i - 1, j - 1] + best
    return c


@njit(cache=True)
def _walk_back(c):  # pragma: no cover - exercised via dtw()
    """Backtrack the cost matrix; prefers diagonal, then up, then left."""
    n = c.shape[0] - 1
    m = c.shape[1] - 1
    maxlen = n + m - 1 if n + m - 1 > 0 else 1
    pi = np.empty(maxlen, np.int64)
    pj = np.empty(maxlen, np.int64)
    i, j = n, m
    k = maxlen
    while True:
        k -= 1
        pi[k] = i
        pj[k] = j
        if i == 1 and j == 1:
            break
        diag = c[i - 1, j - 1]
        up = c[i - 1, j]
        left = c[i, j - 1]
        best = diag
        if up < best:
            best = up
        if left < best:
            best = left
        if diag == best:
            i -= 1
            j -= 1
        elif up == best:
            i -= 1
        else:
            j -= 1
    return pi[k:], pj[k:]


def _as_series(x, name: str) -> np.ndarray:
    arr = np.asarray(x, dtype=np.float64)
    if arr.ndim != 1:
        raise ValueError(f"{name} must be one-dimensional, got shape {arr.shape}")
    if arr.shape[0] == 0:
        raise EmptySequence(f"{name} has length 0")
    if not np.all(np.isfinite(arr)):
        raise ValueError(f"{name} contains non-finite values")
    return arr


def _band_value(window, n: int, m: int) -> int:
    if window is None:
        return -1
    w = int(window)
    if w < 0:
        raise ValueError("window must be >= 0 (or None for unbounded)")
    if w < abs(n - m):
        raise BandInfeasible(
            f"window {w} < |n - m| = {abs(n - m)}: the band excludes ({n}, {m})"
        )
    return w


def dtw(a, b, window=None, sqrt: bool = False) -> tuple[float, WarpingPath]:
    """Minimum warping cost and the optimal warping path.

    Parameters
    ----------
    a, b : array-like
        Input series, length >= 1 each.
    window : int or None
        Sakoe-Chiba band half-width; None allows any |i - j|.
    sqrt : bool
        Report sqrt(cost) instead of the raw accumulated cost.  The
        path (and its ``cost`` field) always carries the raw value.

    Returns
    -------
    (cost, path)
        ``cost`` is the minimum accumulated squared-distance cost over
        all admissible paths (square-rooted when ``sqrt``); ``path``
        realizes it and satisfies the boundary, continuity,
        monotonicity and length invariants.
    """
    av = _as_series(a, "a")
    bv = _as_series(b, "b")
    band = _band_value(window, av.shape[0], bv.shape[0])
    c = _accumulated_cost(av, bv, band)
    raw = float(c[-1, -1])
    pi, pj = _walk_back(c)
    path = WarpingPath(pairs=np.stack((pi, pj), axis=1), cost=raw)
    return (math.sqrt(raw) if sqrt else raw), path


def dtw_cost(a, b, window=None, sqrt: bool = False) -> float:
    """Cost-only variant of :func:`dtw` (skips path recovery)."""
    av = _as_series(a, "a")
    bv = _as_series(b, "b")
    band = _band_value(window, av.shape[0], bv.shape[0])
    raw = float(_accumulated_cost(av, bv, band)[-1, -1])
    return math.sqrt(raw) if sqrt else raw


def vector_distance(a, b, metric: str) -> float:
    """Euclidean, Manhattan or cosine distance between equal-length vectors."""
    av = _as_series(a, "a")
    bv = _as_series(b, "b")
    if av.shape[0] != bv.shape[0]:
        raise LengthMismatch(f"lengths differ: {av.shape[0]} vs {bv.shape[0]}")
    if metric == "euclidean":
        return float(np.sqrt(((av - bv) ** 2).sum()))
    if metric == "manhattan":
        return float(np.abs(av - bv).sum())
    if metric == "cosine":
        na = float(np.sqrt((av * av).sum()))
        nb = float(np.sqrt((bv * bv).sum()))
        if na == 0.0 or nb == 0.0:
            raise ZeroVector("cosine distance is undefined for an all-zero vector")
        return float(1.0 - float(av @ bv) / (na * nb))
    raise ValueError(f"unknown metric {metric!r}; expected dtw or one of {VECTOR_METRICS}")


@njit(cache=True)
def _pairwise_dtw(X, band):  # pragma: no cover - exercised via the wrapper
    n = X.shape[0]
    D = np.zeros((n, n))
    for i in range(n):
        for j in range(i + 1, n):
            c = _accumulated_cost(X[i], X[j], band)
            d = c[c.shape[0] - 1, c.shape[1] - 1]
            D[i, j] = d
            D[j, i] = d
    return D


def pairwise_distance_matrix(values, metric: str = "dtw", window=None) -> np.ndarray:
    """Symmetric n x n distance matrix over the rows of an (n, T) panel.

    ``metric`` is ``"dtw"`` (raw banded warping cost with the given
    window) or one of the vector metrics; every entry depends on exactly
    one pair, so the result does not depend on evaluation order.
    """
    X = np.asarray(values, dtype=np.float64)
    if X.ndim != 2 or X.shape[0] < 2:
        raise ValueError(f"need an (n, T) panel with n >= 2, got shape {X.shape}")
    if X.shape[1] == 0:
        raise EmptySequence("panel has no samples")
    if metric == "dtw":
        band = _band_value(window, X.shape[1], X.shape[1])
        return _pairwise_dtw(X, band)
    if metric not in VECTOR_METRICS:
        raise ValueError(f"unknown metric {metric!r}")
    n = X.shape[0]
    D = np.zeros((n, n))
    for i in range(n):
        for j in range(i + 1, n):
            D[i, j] = D[j, i] = vector_distance(X[i], X[j], metric)
    return D
