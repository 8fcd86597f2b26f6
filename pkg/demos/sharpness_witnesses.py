"""
The Gruss-type bounds are attained
==================================

If f' equals the first-order kernel p1, the plain error meets its bound with
equality.  If f'' equals p2, the corrected error does.  Both are checked
here with exact piecewise-polynomial arithmetic.
"""

import numpy as np
from numpy.polynomial import Polynomial

from optiquad import kernels
from optiquad.bounds import bound_gruss_first, bound_gruss_second
from optiquad.constants import CORRECTION_FACTOR, W_END, W_MID


def antiderivative(pieces, start=0.0):
    out, value = [], start
    for lo, hi, p in pieces:
        q = p.integ()
        q = q - q(lo) + value
        out.append((lo, hi, q))
        value = q(hi)
    return out


def integral(pieces):
    return sum(p.integ()(hi) - p.integ()(lo) for lo, hi, p in pieces)


def at(pieces, t):
    return next(p(t) for lo, hi, p in pieces if lo <= t <= hi)


def rule(pieces):
    return W_END * at(pieces, 0.0) + W_MID * at(pieces, 0.5) + W_END * at(pieces, 1.0)


def sigma(pieces):
    sq = integral([(lo, hi, p * p) for lo, hi, p in pieces])
    return np.sqrt(sq - integral(pieces) ** 2)


p1 = kernels.pieces(kernels.P1)
f = antiderivative(p1)
q = integral(f) - rule(f)
print("|Q|       ", abs(q))
print("bound     ", bound_gruss_first(sigma(p1), (0, 1)).value)

p2 = kernels.pieces(kernels.P2)
fp = antiderivative(p2)
f = antiderivative(fp)
q = integral(f) - rule(f)
p = CORRECTION_FACTOR * (at(fp, 1.0) - at(fp, 0.0))
print("|Q - P|   ", abs(q - p))
print("bound     ", bound_gruss_second(sigma(p2), (0, 1)).value)
