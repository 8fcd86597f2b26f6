"""Peano kernels of the closed 3-point rule family on [0, 1].

All kernels here are piecewise polynomials of degree <= 2 with a single break
at t = 1/2.  The break point belongs to the left branch.  Norms and Chebyshev
functionals are computed by splitting each branch at its real roots and
integrating the polynomial pieces exactly, so no quadrature tolerance leaks
into the constants.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass

import numpy as np
from numpy.polynomial import Polynomial

from . import constants as C
from .errors import DomainError

BREAK = 0.5


@dataclass(frozen=True)
class KernelParams:
    """Knots of the two parabolic branches: (t-alpha)(t-beta)/2 left, (t-gamma)(t-delta)/2 right."""

    alpha: float
    beta: float
    gamma: float
    delta: float

    def __post_init__(self):
        for name in ("alpha", "beta", "gamma", "delta"):
            if not math.isfinite(getattr(self, name)):
                raise DomainError(f"kernel knot {name} must be finite")

    @classmethod
    def symmetric(cls, beta: float) -> "KernelParams":
        """The one-parameter family (0, beta, 1 - beta, 1) used by the optimizer."""
        return cls(0.0, beta, 1.0 - beta, 1.0)


OPTIMAL = KernelParams.symmetric(C.BETA_STAR)
SIMPSON = KernelParams(0.0, 1.0 / 3.0, 2.0 / 3.0, 1.0)


class KernelTag(enum.Enum):
    K1 = "K1"
    K2 = "K2"
    P1 = "P1"
    P2 = "P2"
    P2_TILDE = "P2Tilde"


@dataclass(frozen=True)
class KernelId:
    tag: KernelTag
    params: KernelParams | None = None

    def __post_init__(self):
        if self.tag in (KernelTag.K1, KernelTag.K2) and self.params is None:
            raise DomainError(f"{self.tag.value} requires KernelParams")


P1 = KernelId(KernelTag.P1)
P2 = KernelId(KernelTag.P2)
P2_TILDE = KernelId(KernelTag.P2_TILDE)


def _check_unit(t):
    arr = np.asarray(t, dtype=float)
    if np.any(~((arr >= 0.0) & (arr <= 1.0))):
        raise DomainError(f"kernel argument outside [0, 1]: {t!r}")
    return arr


def _select(t, left, right):
    arr = _check_unit(t)
    out = np.where(arr <= BREAK, left(arr), right(arr))
    return float(out) if out.ndim == 0 else out


def eval_k2(params: KernelParams, t):
    """Second-order kernel K2(alpha, beta, gamma, delta, t)."""
    p = params
    return _select(
        t,
        lambda s: 0.5 * (s - p.alpha) * (s - p.beta),
        lambda s: 0.5 * (s - p.gamma) * (s - p.delta),
    )


def eval_k1(params: KernelParams, t):
    """First-order kernel: t - (alpha+beta)/2 left of 1/2, t - (gamma+delta)/2 right."""
    p = params
    return _select(
        t,
        lambda s: s - (p.alpha + p.beta) / 2.0,
        lambda s: s - (p.gamma + p.delta) / 2.0,
    )


def eval_p1(t):
    return eval_k1(OPTIMAL, t)


def eval_p2(t):
    return eval_k2(OPTIMAL, t)


def eval_p2_tilde(t):
    """p2 shifted by a constant so that its mean over [0, 1] vanishes."""
    v = eval_p2(t)
    return v + C.P2_SHIFT


def evaluate(kid: KernelId, t):
    if kid.tag is KernelTag.K1:
        return eval_k1(kid.params, t)
    if kid.tag is KernelTag.K2:
        return eval_k2(kid.params, t)
    return {
        KernelTag.P1: eval_p1,
        KernelTag.P2: eval_p2,
        KernelTag.P2_TILDE: eval_p2_tilde,
    }[kid.tag](t)


def pieces(kid: KernelId) -> list[tuple[float, float, Polynomial]]:
    """Polynomial branches ``(lo, hi, poly)`` of a kernel on [0, 1/2] and [1/2, 1]."""
    tag = kid.tag
    if tag in (KernelTag.K1, KernelTag.P1):
        p = kid.params if tag is KernelTag.K1 else OPTIMAL
        left = Polynomial([-(p.alpha + p.beta) / 2.0, 1.0])
        right = Polynomial([-(p.gamma + p.delta) / 2.0, 1.0])
    else:
        p = kid.params if tag is KernelTag.K2 else OPTIMAL
        left = 0.5 * Polynomial([-p.alpha, 1.0]) * Polynomial([-p.beta, 1.0])
        right = 0.5 * Polynomial([-p.gamma, 1.0]) * Polynomial([-p.delta, 1.0])
        if tag is KernelTag.P2_TILDE:
            left = left + C.P2_SHIFT
            right = right + C.P2_SHIFT
    return [(0.0, BREAK, left), (BREAK, 1.0, right)]


def _real_roots_inside(poly: Polynomial, lo: float, hi: float) -> list[float]:
    if poly.degree() < 1:
        return []
    out = []
    for r in poly.roots():
        if abs(r.imag) <= 1e-14 * max(1.0, abs(r.real)) and lo < r.real < hi:
            out.append(float(r.real))
    return sorted(out)


def _definite(poly: Polynomial, lo: float, hi: float) -> float:
    anti = poly.integ()
    return float(anti(hi) - anti(lo))


def integrate_abs(poly: Polynomial, lo: float, hi: float) -> float:
    """Exact integral of |poly| over [lo, hi], split at interior real roots."""
    knots = [lo, *_real_roots_inside(poly, lo, hi), hi]
    return math.fsum(abs(_definite(poly, x0, x1)) for x0, x1 in zip(knots, knots[1:]))


def kernel_integral(kid: KernelId) -> float:
    """Signed integral of the kernel over [0, 1]."""
    return math.fsum(_definite(p, lo, hi) for lo, hi, p in pieces(kid))


def kernel_l1_norm(kid: KernelId) -> float:
    """Integral of |kernel| over [0, 1] by exact root-split integration."""
    return math.fsum(integrate_abs(p, lo, hi) for lo, hi, p in pieces(kid))


def kernel_sup_norm(kid: KernelId) -> float:
    """Max of |kernel| over [0, 1] from endpoints, break point and stationary points."""
    best = 0.0
    for lo, hi, p in pieces(kid):
        cands = [lo, hi, *_real_roots_inside(p.deriv(), lo, hi)]
        best = max(best, max(abs(float(p(x))) for x in cands))
    return best


def kernel_chebyshev_T(kid: KernelId) -> float:
    """Chebyshev functional T(k, k) = <k, k> - <k, e>^2 on [0, 1]."""
    sq = math.fsum(_definite(p * p, lo, hi) for lo, hi, p in pieces(kid))
    mean = kernel_integral(kid)
    return sq - mean * mean
