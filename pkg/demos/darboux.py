"""Slopes of a differentiable convex curve form an interval.

For the parabola the slopes fill [0, 2], so every cell at every scale is met.

Run: python demos/darboux.py
"""
from linecover import Parabola
from linecover.boxdim import boxes_of_intervals, fit_dimension, slope_interval_cover

cover = slope_interval_cover(Parabola(), 10)
ks = list(range(4, 13))
counts = [boxes_of_intervals(cover, k) for k in ks]
for k, c in zip(ks, counts):
    print(f"k={k:2d}  cells {c:5d}  (2^k = {2 ** k})")
dim, resid = fit_dimension(ks, counts)
print(f"fitted dimension {dim:.4f}, residual {resid:.2e}")
