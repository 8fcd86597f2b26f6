"""
An integrand with an unbounded derivative
=========================================

f(t) = cbrt(sin(t^2)) on [0, 1] has f'(t) -> infinity as t -> 0, so none of
the range-type bounds on f' apply.  ||f'||_2 is still finite (at most 4/3),
which is all the Gruss-type bound needs.
"""

from optiquad.analysis import build_info, l2_norm
from optiquad.bounds import best_bounds
from optiquad.composite import CompositeConfig, composite_report
from optiquad.expr import eval_jet, parse

f = parse("cbrt(sin(t^2))")
for t in (1e-2, 1e-4, 1e-6):
    print(f"f'({t:g}) = {eval_jet(f, t).d1:.4g}")

print("||f'||_2 =", l2_norm(f, 1, (0.0, 1.0)), "<= 4/3")
info = build_info(f, (0.0, 1.0))
print("single interval:", [(b.theorem_tag.value, round(b.value, 6)) for b in best_bounds(info, (0.0, 1.0))])

for n in (1, 4, 16):
    rep = composite_report(f, CompositeConfig((0.0, 1.0), n), info=info)
    print(f"n={n:2d} estimate={rep.estimate:.10f}", [(b.theorem_tag.value, b.variant, f"{b.value:.3e}") for b in rep.bounds])
