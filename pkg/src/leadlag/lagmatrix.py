"""Lead-lag matrices: warping-path lag extraction and the CCF benchmark.

Sign conventions live here and nowhere else.  A warping path between
series i and j yields per-step offsets ``delta = i_index - j_index``, so
on a noiseless lagged pair the estimated entry equals ``lag_i - lag_j``:
for the mode/median estimators a POSITIVE entry means the row series
TRAILS the column series.  The cross-correlation score has the opposite
orientation (positive means the row series leads).  ``leader_sign``
maps an estimator tag to the factor that turns a row sum into a
"larger = more leading" key; ranking code must consume it from here.
"""

from __future__ import annotations

import csv
import json
from dataclasses import dataclass

import numpy as np
from numba import njit

from .cluster import ClusterAssignment, kmeans, kmedoids
from .dtw import WarpingPath, _accumulated_cost, _band_value, _walk_back, dtw, pairwise_distance_matrix
from .errors import DegenerateOverlap, NotSingleMembership, ShapeMismatch

ESTIMATORS = ("mode", "median", "ccf_auc")

# True: positive entry = row lags column (pinned by the noiseless
# factor-model experiment, where the estimated matrix must equal the
# ground truth lag differences).  False: positive entry = row leads.
ROW_LAGS_POSITIVE = {"mode": True, "median": True, "ccf_auc": False}


def leader_sign(estimator: str) -> float:
    """Multiplier making ``leader_sign * row_sum`` larger for leaders."""
    return -1.0 if ROW_LAGS_POSITIVE[estimator] else 1.0


@dataclass
class LeadLagMatrix:
    """Antisymmetric n x n matrix of estimated pairwise lags."""

    values: np.ndarray
    estimator: str

    @property
    def n(self) -> int:
        return self.values.shape[0]


def path_offsets(path: WarpingPath | np.ndarray) -> np.ndarray:
    """Per-step index differences i - j along a warping path."""
    pairs = path.pairs if isinstance(path, WarpingPath) else np.asarray(path)
    return (pairs[:, 0] - pairs[:, 1]).astype(np.int64)


def lag_estimate(offsets, estimator: str = "mode") -> float:
    """Collapse an offset sample to a single lag.

    mode: most frequent value, ties broken toward the smallest absolute
    value and then toward the negative one.  median: standard median
    (mean of the middle two for even lengths, so possibly half-integer).
    """
    offs = np.asarray(offsets)
    if offs.size == 0:
        raise ValueError("empty offset sample")
    if estimator == "mode":
        vals, counts = np.unique(offs, return_counts=True)
        tied = vals[counts == counts.max()]
        order = np.lexsort((tied, np.abs(tied)))
        return float(tied[order[0]])
    if estimator == "median":
        return float(np.median(offs))
    raise ValueError(f"unknown estimator {estimator!r}")


def leadlag_matrix_dtw(values, assignment: ClusterAssignment, window=None,
                       estimator: str = "mode") -> LeadLagMatrix:
    """Pairwise lag matrix over same-cluster pairs (zero across clusters).

    For each unordered same-cluster pair i < j the entry is the lag
    estimate of the warping-path offsets of (series i, series j), and
    the (j, i) entry is its negative.
    """
    X = np.asarray(values, dtype=np.float64)
    n = X.shape[0]
    labels = np.asarray(assignment.labels)
    if labels.shape[0] != n:
        raise ShapeMismatch(f"assignment covers {labels.shape[0]} series, panel has {n}")
    g = np.zeros((n, n))
    for i in range(n):
        for j in range(i + 1, n):
            if labels[i] != labels[j]:
                continue
            _, path = dtw(X[i], X[j], window)
            v = lag_estimate(path_offsets(path), estimator)
            g[i, j] = v
            g[j, i] = -v
    return LeadLagMatrix(values=g, estimator=estimator)


def _pearson(xs: np.ndarray, ys: np.ndarray) -> float:
    xc = xs - xs.mean()
    yc = ys - ys.mean()
    sx = float((xc * xc).sum())
    sy = float((yc * yc).sum())
    if sx == 0.0 or sy == 0.0:
        raise DegenerateOverlap("zero variance in the overlap")
    return float((xc * yc).sum() / np.sqrt(sx * sy))


def ccf(xi, xj, m: int, corr=None) -> float:
    """Sample cross-correlation at lag m: corr of {x_i^{t-m}} vs {x_j^t}.

    ``corr`` is the correlation kernel applied to the shifted overlap;
    Pearson by default.
    """
    a = np.asarray(xi, dtype=np.float64)
    b = np.asarray(xj, dtype=np.float64)
    if m >= 0:
        xs, ys = a[: a.shape[0] - m], b[m:]
    else:
        xs, ys = a[-m:], b[: b.shape[0] + m]
    if xs.shape[0] != ys.shape[0]:
        raise ShapeMismatch("series lengths differ")
    if xs.shape[0] < 2:
        raise DegenerateOverlap(f"overlap of length {xs.shape[0]} at lag {m}")
    return (corr or _pearson)(xs, ys)


def _auc(a: np.ndarray, b: np.ndarray, max_lag: int, corr) -> float:
    return sum(abs(ccf(a, b, m, corr)) for m in range(1, max_lag + 1))


def ccf_auc_leadlag(values, max_lag: int = 5, corr=None) -> LeadLagMatrix:
    """Signed normalized cross-correlation AUC score for every pair.

    With I(i, j) the sum over lags 1..max_lag of |CCF| in the i-leads-j
    direction, the entry is (I(i, j) - I(j, i)) / (I(i, j) + I(j, i)),
    which lies in [-1, 1], is antisymmetric, and is 0 for an exactly
    symmetric pair (or when both sums vanish).
    """
    if max_lag < 1:
        raise ValueError("max_lag must be >= 1")
    X = np.asarray(values, dtype=np.float64)
    n = X.shape[0]
    g = np.zeros((n, n))
    for i in range(n):
        for j in range(i + 1, n):
            fwd = _auc(X[i], X[j], max_lag, corr)
            bwd = _auc(X[j], X[i], max_lag, corr)
            denom = fwd + bwd
            v = 0.0 if denom == 0.0 else (fwd - bwd) / denom
            g[i, j] = v
            g[j, i] = -v
    return LeadLagMatrix(values=g, estimator="ccf_auc")


def error_matrix(gamma, psi) -> tuple[np.ndarray, float]:
    """Elementwise error against the ground truth and its mean square."""
    gv = gamma.values if isinstance(gamma, LeadLagMatrix) else np.asarray(gamma, float)
    pv = np.asarray(psi, dtype=np.float64)
    if gv.shape != pv.shape:
        raise ShapeMismatch(f"shapes differ: {gv.shape} vs {pv.shape}")
    e = gv - pv
    return e, float((e * e).mean())


def ground_truth_psi(L, B) -> np.ndarray:
    """True pairwise lag differences implied by a single-membership model.

    Rows i and j loading on the same factor f get ``L[i, f] - L[j, f]``
    (positive = row lags, matching the mode/median estimators); pairs on
    different factors get 0.
    """
    Lm = np.asarray(L)
    Bm = np.asarray(B, dtype=np.float64)
    if Lm.shape != Bm.shape:
        raise ShapeMismatch(f"L shape {Lm.shape} != B shape {Bm.shape}")
    nz = Bm != 0.0
    if not np.all(nz.sum(axis=1) == 1):
        raise NotSingleMembership("every row of B must have exactly one nonzero entry")
    fac = np.argmax(nz, axis=1)
    own = Lm[np.arange(Lm.shape[0]), fac].astype(np.float64)
    same = fac[:, None] == fac[None, :]
    return np.where(same, own[:, None] - own[None, :], 0.0)


# -- detection pipeline ------------------------------------------------------

@njit(cache=True)
def _dtw_cost_and_lag(X, band, use_mode):  # pragma: no cover - via detect()
    """One DP per pair: distance matrix plus dense pairwise lag estimates.

    Must agree bit-for-bit with dtw() + path_offsets() + lag_estimate();
    the equivalence is pinned by tests.
    """
    n = X.shape[0]
    D = np.zeros((n, n))
    G = np.zeros((n, n))
    for i in range(n):
        for j in range(i + 1, n):
            c = _accumulated_cost(X[i], X[j], band)
            d = c[c.shape[0] - 1, c.shape[1] - 1]
            D[i, j] = d
            D[j, i] = d
            pi, pj = _walk_back(c)
            offs = np.sort(pi - pj)
            if use_mode:
                best_v = offs[0]
                best_c = 0
                cur_v = offs[0]
                cur_c = 0
                for t in range(offs.shape[0] + 1):
                    if t < offs.shape[0] and offs[t] == cur_v:
                        cur_c += 1
                        continue
                    better = cur_c > best_c
                    if not better and cur_c == best_c:
                        if abs(cur_v) < abs(best_v):
                            better = True
                        elif abs(cur_v) == abs(best_v) and cur_v < best_v:
                            better = True
                    if better:
                        best_v = cur_v
                        best_c = cur_c
                    if t < offs.shape[0]:
                        cur_v = offs[t]
                        cur_c = 1
                v = float(best_v)
            else:
                half = offs.shape[0] // 2
                if offs.shape[0] % 2 == 1:
                    v = float(offs[half])
                else:
                    v = (float(offs[half - 1]) + float(offs[half])) / 2.0
            G[i, j] = v
            G[j, i] = -v
    return D, G


@dataclass
class DetectorConfig:
    """One end-to-end detection recipe: cluster, then estimate lags."""

    method: str = "dtw_mode"       # dtw_mode | dtw_median | ccf_auc
    k_clusters: int = 1
    window: int | None = None      # Sakoe-Chiba half-width, None = unbounded
    max_lag: int = 5               # CCF AUC horizon
    clusterer: str = "kmedoids"    # kmedoids | kmeans
    cluster_metric: str = "dtw"    # dtw | euclidean | manhattan | cosine
    seed: int = 0                  # kmeans initialization only

    @property
    def estimator(self) -> str:
        if self.method in ("dtw_mode", "dtw_median"):
            return self.method.removeprefix("dtw_")
        if self.method == "ccf_auc":
            return "ccf_auc"
        raise ValueError(f"unknown detector {self.method!r}")


def detect(values, config: DetectorConfig) -> tuple[ClusterAssignment, LeadLagMatrix]:
    """Cluster a panel and build its lead-lag matrix in one call.

    The CCF detector needs no clustering and reports a single trivial
    cluster.  For the DTW detectors the same-cluster mask is applied to
    lags estimated pairwise from warping paths, exactly as the composed
    public operations would produce.
    """
    X = np.asarray(values, dtype=np.float64)
    if X.ndim != 2 or X.shape[1] == 0:
        raise ValueError(f"need a nonempty (n, T) panel, got shape {X.shape}")
    n = X.shape[0]
    est = config.estimator
    if est == "ccf_auc":
        assignment = ClusterAssignment(labels=np.ones(n, dtype=np.int64), k=1, medoids=None)
        return assignment, ccf_auc_leadlag(X, config.max_lag)

    if config.cluster_metric == "dtw":
        band = _band_value(config.window, X.shape[1], X.shape[1])
        D, G = _dtw_cost_and_lag(X, band, est == "mode")
    else:
        D = pairwise_distance_matrix(X, metric=config.cluster_metric, window=config.window)
        G = None
    if config.clusterer == "kmedoids":
        assignment = kmedoids(D, config.k_clusters, seed=config.seed)
    elif config.clusterer == "kmeans":
        assignment = kmeans(X, config.k_clusters, seed=config.seed)
    else:
        raise ValueError(f"unknown clusterer {config.clusterer!r}")
    if G is None:
        return assignment, leadlag_matrix_dtw(X, assignment, config.window, est)
    labels = assignment.labels
    same = labels[:, None] == labels[None, :]
    np.fill_diagonal(same, False)
    return assignment, LeadLagMatrix(values=np.where(same, G, 0.0), estimator=est)


# -- serialization -----------------------------------------------------------

def _fmt(x: float) -> str:
    return repr(float(x))


def write_matrix_csv(values, asset_ids, path) -> None:
    """n x n matrix with a header row and a leading column of asset ids."""
    V = np.asarray(values, dtype=np.float64)
    ids = list(asset_ids)
    with open(path, "w", encoding="utf-8", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(["id"] + ids)
        for i, name in enumerate(ids):
            w.writerow([name] + [_fmt(v) for v in V[i]])


def read_matrix_csv(path) -> tuple[list[str], np.ndarray]:
    with open(path, "r", encoding="utf-8", newline="") as fh:
        rows = list(csv.reader(fh))
    ids = rows[0][1:]
    V = np.array([[float(c) for c in r[1:]] for r in rows[1:]], dtype=np.float64)
    return ids, V


def write_leadlag_csv(matrix: LeadLagMatrix, asset_ids, path) -> None:
    write_matrix_csv(matrix.values, asset_ids, path)


def read_leadlag_csv(path, estimator: str = "mode") -> tuple[list[str], LeadLagMatrix]:
    ids, V = read_matrix_csv(path)
    return ids, LeadLagMatrix(values=V, estimator=estimator)


def write_leadlag_json(matrix: LeadLagMatrix, asset_ids, path) -> None:
    payload = {
        "asset_ids": list(asset_ids),
        "estimator": matrix.estimator,
        "values": [[float(v) for v in row] for row in matrix.values],
    }
    with open(path, "w", encoding="utf-8", newline="") as fh:
        json.dump(payload, fh, indent=2)
        fh.write("\n")


def read_leadlag_json(path) -> tuple[list[str], LeadLagMatrix]:
    with open(path, "r", encoding="utf-8") as fh:
        payload = json.load(fh)
    V = np.array(payload["values"], dtype=np.float64)
    return list(payload["asset_ids"]), LeadLagMatrix(values=V, estimator=payload["estimator"])
