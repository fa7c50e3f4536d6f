"""The slope set of the digit curve is covered by 2**n intervals of length 2**-(n*n).

Run: python demos/slope_cover.py
"""
from linecover import DigitCurve, Parabola
from linecover.boxdim import boxes_of_intervals, slope_cover_check, slope_interval_cover

print("n  intervals  widest block        bound 2^-(n^2)")
for n in range(1, 7):
    r = slope_cover_check(n)
    print(f"{n}  {r['intervals']:9d}  {float(r['max_diameter']):.3e}   {float(r['bound']):.3e}  certified={r['certified']}")

print("\ncells of size 2^-k met by each slope set, k = n^2")
for n in range(2, 5):
    k = n * n
    digit = boxes_of_intervals(slope_interval_cover(DigitCurve(), n), k)
    par = boxes_of_intervals(slope_interval_cover(Parabola(), n), k)
    print(f"k={k:2d}  digit curve {digit:5d}  parabola {par:6d}")
print("\nThe digit curve needs about 2^sqrt(k) cells; the parabola needs 2^k.")
