"""K-Medoids (PAM) over precomputed distances, K-Means, and the ARI score.

K-Medoids is the denoising step of the detection pipeline: greedy BUILD
initialization followed by best-improvement SWAP descent until no swap
lowers the total within-cluster distance to medoids.  Both stages are
deterministic; the ``seed`` argument exists for API symmetry with
K-Means, whose initialization is the only seeded randomness here.

All tie-breaks prefer the lower index: nearest-medoid assignment, the
BUILD candidate, and the (medoid-out, point-in) swap pair.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import KTooLarge, LengthMismatch

_SWAP_EPS = 1e-12
_MAX_SWAPS = 512


@dataclass
class ClusterAssignment:
    """Labels in 1..k plus, for K-Medoids, the sorted medoid indices."""

    labels: np.ndarray
    k: int
    medoids: list[int] | None = None

    def total_cost(self, distance: np.ndarray) -> float:
        """Sum of distances to the assigned medoid (K-Medoids only)."""
        if self.medoids is None:
            raise ValueError("total_cost needs medoids")
        med = np.asarray(self.medoids)
        return float(distance[np.arange(len(self.labels)), med[self.labels - 1]].sum())


def _check_distance(distance) -> np.ndarray:
    D = np.asarray(distance, dtype=np.float64)
    if D.ndim != 2 or D.shape[0] != D.shape[1]:
        raise ValueError(f"distance matrix must be square, got shape {D.shape}")
    return D


def _pam_build(D: np.ndarray, k: int) -> list[int]:
    medoids = [int(np.argmin(D.sum(axis=1)))]
    nearest = D[:, medoids[0]].copy()
    while len(medoids) < k:
        # total-cost reduction if candidate c became a medoid
        reduction = np.maximum(nearest[:, None] - D, 0.0).sum(axis=0)
        reduction[medoids] = -np.inf
        c = int(np.argmax(reduction))
        medoids.append(c)
        np.minimum(nearest, D[:, c], out=nearest)
    return sorted(medoids)


def _pam_swap(D: np.ndarray, medoids: list[int]) -> list[int]:
    n = D.shape[0]
    for _ in range(_MAX_SWAPS):
        med = np.asarray(medoids)
        dm = D[:, med]
        near_pos = np.argmin(dm, axis=1)  # first min -> lowest medoid index
        d_near = dm[np.arange(n), near_pos]
        if len(medoids) > 1:
            dm2 = dm.copy()
            dm2[np.arange(n), near_pos] = np.inf
            d_second = dm2.min(axis=1)
        else:
            d_second = np.full(n, np.inf)
        total = float(d_near.sum())

        non_medoids = np.setdiff1d(np.arange(n), med, assume_unique=False)
        best_impr = 0.0
        best_swap = None
        for pos, m_out in enumerate(medoids):  # medoids sorted -> tie order
            base = np.where(near_pos == pos, d_second, d_near)
            new_costs = np.minimum(base[:, None], D[:, non_medoids]).sum(axis=0)
            h_pos = int(np.argmin(new_costs))  # first min -> lowest point index
            impr = total - float(new_costs[h_pos])
            if impr > best_impr + _SWAP_EPS:
                best_impr = impr
                best_swap = (m_out, int(non_medoids[h_pos]))
        if best_swap is None:
            return medoids
        m_out, h_in = best_swap
        medoids = sorted(set(medoids) - {m_out} | {h_in})
    return medoids


def kmedoids(distance, k: int, seed: int = 0) -> ClusterAssignment:
    """PAM clustering on a precomputed symmetric distance matrix.

    Deterministic for a fixed (distance, k); ``seed`` is accepted for
    interface parity and unused.  Clusters are numbered 1..k in
    ascending medoid order; every medoid belongs to its own cluster.
    """
    del seed
    D = _check_distance(distance)
    n = D.shape[0]
    if not 1 <= k <= n:
        raise KTooLarge(f"k={k} out of range for n={n}")
    medoids = _pam_swap(D, _pam_build(D, k)) if k < n else list(range(n))
    med = np.asarray(medoids)
    labels = np.argmin(D[:, med], axis=1) + 1
    labels[med] = np.arange(1, k + 1)  # a medoid always owns its cluster
    return ClusterAssignment(labels=labels.astype(np.int64), k=k, medoids=medoids)


def kmeans(values, k: int, seed: int = 0, max_iter: int = 300) -> ClusterAssignment:
    """Lloyd iteration on raw series vectors until the assignment stops moving.

    Initial centers are k distinct rows drawn with the seeded generator;
    an emptied cluster is reseeded from the point farthest from its
    current center.  Deterministic for a fixed (values, k, seed).
    """
    X = np.asarray(values, dtype=np.float64)
    if X.ndim != 2:
        raise ValueError(f"need an (n, T) panel, got shape {X.shape}")
    n = X.shape[0]
    if not 1 <= k <= n:
        raise KTooLarge(f"k={k} out of range for n={n}")
    rng = np.random.default_rng(seed)
    centers = X[np.sort(rng.choice(n, size=k, replace=False))].copy()
    labels = np.full(n, -1)
    for _ in range(max_iter):
        d2 = ((X[:, None, :] - centers[None, :, :]) ** 2).sum(axis=2)
        new_labels = np.argmin(d2, axis=1)
        for c in range(k):
            if np.any(new_labels == c):
                continue
            # reseed from the farthest point whose cluster can spare it
            counts = np.bincount(new_labels, minlength=k)
            movable = np.where(counts[new_labels] > 1)[0]
            far = int(movable[np.argmax(d2[movable, new_labels[movable]])])
            new_labels[far] = c
            centers[c] = X[far]
        if np.array_equal(labels, new_labels):
            break
        labels = new_labels
        for c in range(k):
            centers[c] = X[labels == c].mean(axis=0)
    return ClusterAssignment(labels=(labels + 1).astype(np.int64), k=k, medoids=None)


def adjusted_rand_index(a, b) -> float:
    """Chance-adjusted agreement between two partitions, in [-1, 1].

    Computed from the pair-counting contingency table; identical
    partitions (including the trivial one-cluster case) score exactly 1.
    """
    la = np.asarray(a).ravel()
    lb = np.asarray(b).ravel()
    if la.shape[0] != lb.shape[0]:
        raise LengthMismatch(f"label lengths differ: {la.shape[0]} vs {lb.shape[0]}")
    n = la.shape[0]
    if n < 2:
        raise LengthMismatch("need at least 2 points")
    _, ia = np.unique(la, return_inverse=True)
    _, ib = np.unique(lb, return_inverse=True)
    r, c = ia.max() + 1, ib.max() + 1
    cont = np.zeros((r, c), dtype=np.int64)
    np.add.at(cont, (ia, ib), 1)

    sum_sq = int((cont.astype(np.int64) ** 2).sum())
    sum_a = int((cont.sum(axis=1) ** 2).sum())
    sum_b = int((cont.sum(axis=0) ** 2).sum())
    # doubled pair counts; the factor 2 cancels in the ratio
    tp = sum_sq - n
    fn = sum_a - sum_sq
    fp = sum_b - sum_sq
    tn = n * n - n - tp - fn - fp
    if fn == 0 and fp == 0:
        return 1.0
    return float(2.0 * (tp * tn - fn * fp) / ((tp + fp) * (fp + tn) + (tp + fn) * (fn + tn)))
