"""Box-count the union of tangent segments for the parabola and the digit curve.

Both families use 512 tangent points on a dyadic grid, clipped to [0,1] x [-1,1].
Writes an SVG of a small digit-curve family next to this script.

Run: python demos/dimension_contrast.py
"""
from pathlib import Path

from linecover import DigitCurve, Parabola
from linecover.boxdim import family_report
from linecover.figures import family_svg
from linecover.lines import SampleSpec, Window, build_family

window = Window.of(0, -1, 1, 1)
dims = {}
for name, curve in (("parabola", Parabola()), ("digit curve", DigitCurve())):
    fam = build_family(curve, SampleSpec(512, "dyadic-grid", "right"), window)
    rep = family_report(fam, 3, 9)
    dims[name] = rep.fitted_dim
    print(f"{name:12s} counts {rep.counts}  fitted dim {rep.fitted_dim:.3f} over k={rep.fit_range[0]}..{rep.fit_range[1]}")
print(f"difference {dims['parabola'] - dims['digit curve']:.3f}")

small = build_family(DigitCurve(), SampleSpec(16, "dyadic-grid", "right"), window)
out = Path(__file__).with_name("digit_family.svg")
out.write_text(family_svg(small, grid=4))
print(f"wrote {out}")
