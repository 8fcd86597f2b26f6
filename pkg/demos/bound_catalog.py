"""
Which error bounds apply
========================

Every inequality needs different derivative information.  Sampled ranges are
estimates; values the user supplies are what make a bound rigorous.
"""

from optiquad.analysis import build_info
from optiquad.bounds import Functional, best_bounds, tightest
from optiquad.expr import parse

iv = (0.0, 1.0)


def show(src, overrides=None):
    info = build_info(parse(src), iv, overrides)
    bounds = best_bounds(info, iv)
    print(f"\n{src}  overrides={overrides or {}}")
    for b in bounds:
        print(f"  {b.theorem_tag.value:12s} {b.applies_to.value:8s} {b.value:.6g}  rigorous={b.rigorous}")
    best = tightest(bounds)
    for k in (Functional.Q, Functional.Q_MINUS_P):
        if k in best:
            print(f"  tightest on {k.value}: {best[k].theorem_tag.value}")


# everything is available for a polynomial
show("t^2")
# f' = 1/(2 sqrt t) is unbounded; only the lower one-sided bound survives,
# and only once the user supplies the lower bound 1/2 of f'
show("sqrt(t)", {"gamma1": 0.5})
# f'' = 3/(4 sqrt t) >= 3/4: the lower one-sided bound of the corrected rule
show("t^1.5", {"gamma2": 0.75})
# f'' square integrable but unbounded: the corrected Gruss bound applies
show("cbrt(t^5)")
