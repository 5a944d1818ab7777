"""Warping two out-of-phase series: cost, path, and the band constraint.

Run: python demos/01_dtw_alignment.py
"""

import numpy as np

from leadlag import dtw, dtw_cost, path_offsets

rng = np.random.default_rng(0)

# a smooth wave and a 4-sample delayed copy (same length, padded start)
t = np.linspace(0, 4 * np.pi, 60)
a = np.sin(t) + 0.05 * rng.standard_normal(60)
b = np.concatenate([np.full(4, a[0]), a[:-4]])

cost, path = dtw(a, b)
print(f"unbounded warping cost: {cost:.4f}  (path length {len(path)})")
offs = path_offsets(path)
vals, counts = np.unique(offs, return_counts=True)
print("offset histogram (i - j):")
for v, c in zip(vals, counts):
    print(f"  {v:+d}: {'#' * c}")
print(f"most of the path sits at offset -4: the delay of b behind a\n")

print("band size vs cost (bands tighter than the lag forbid the alignment):")
for window in (8, 5, 4, 3, 2, 1, 0):
    print(f"  |i-j| <= {window}: cost {dtw_cost(a, b, window=window):8.4f}")

# window 0 on equal-length series is exactly the squared Euclidean distance
x, y = rng.standard_normal(30), rng.standard_normal(30)
assert dtw_cost(x, y, window=0) == ((x - y) ** 2).sum()
print("\nwindow 0 reduces to the squared Euclidean distance, exactly")
