"""Cover the Cantor-type curve with tangent and vertical lines.

Points of the nowhere-dense set C* get vertical lines; every other point gets
its tangent. Each curve point should lie on exactly one chosen line.

Run: python demos/cantor_cover.py
"""
from fractions import Fraction

from linecover.cantor_c1 import REGISTRY, CantorCurve, cover_rule, gap_image_bound, in_Cstar
from linecover.lines import SampleSpec, build_family, covering_check

for x in (Fraction(0), Fraction(1, 4), Fraction(1, 2), Fraction(3, 64)):
    m = in_Cstar(x)
    print(f"x={str(x):5s}  in C*: {m.status:3s}  line: {cover_rule(x)['rule']}")

curve = CantorCurve()
fam = build_family(curve, SampleSpec(48, "seeded-random", "mixed", seed=5, depth=9))
hits = [h for _, h in covering_check(curve, fam, 40)]
print(f"\n{len(fam.lines)} lines, {sum(l.is_vertical for l in fam.lines)} vertical; multiplicities {sorted(set(hits))}")

print("\nimage of each stage-1 gap under the slope function")
for ref in REGISTRY.gaps(1, 5):
    r = gap_image_bound(ref, 40)
    print(f"gap(1,{ref.i})  length of image <= {float(r['delta'].hi):.6f}   2^-(n+i) = {2.0 ** -(1 + ref.i):.6f}")
