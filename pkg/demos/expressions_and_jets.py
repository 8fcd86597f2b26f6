"""
Integrand expressions and second-order jets
===========================================
"""

import numpy as np

from optiquad.errors import DomainError, ParseError
from optiquad.expr import component, eval_jet, parse, to_source

ast = parse("exp(-t^2) * cos(3*t)")
print(to_source(ast))
j = eval_jet(ast, 0.4)
print("value, f', f'':", j.v, j.d1, j.d2)

# arrays never raise; bad points come back as nan or inf
print(component(parse("sqrt(t)"), 1)(np.array([-1.0, 0.0, 1.0])))

for src in ("2*+3", "sin(t", "foo(t)"):
    try:
        parse(src)
    except ParseError as exc:
        print(f"{src!r}: {exc}  expected={sorted(exc.expected)}")

try:
    eval_jet(parse("log(t)"), 0.0)
except DomainError as exc:
    print("strict evaluation:", exc)
