"""Composite Gauss-Legendre panel quadrature with panel halving.

Used for L2 norms of derivatives, Peano residuals and reference integrals.  An
optional endpoint-clustering substitution turns integrable algebraic endpoint
singularities (t**-2/3 and milder) into smooth integrands, which is what the
derivative norms of functions like cbrt(sin(t^2)) need.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

GL_ORDER = 8
MAX_PANELS = 2**20
_CHUNK = 2**15
_NODES, _WEIGHTS = np.polynomial.legendre.leggauss(GL_ORDER)
# power of the endpoint-clustering map; t ~ u**p near each end
_CLUSTER_P = 6


def vectorize(f):
    """Wrap a scalar callable so it accepts and returns 1-d arrays."""

    def g(x):
        x = np.asarray(x, dtype=float)
        try:
            y = np.asarray(f(x), dtype=float)
            if y.shape == x.shape:
                return y
        except (TypeError, ValueError):
            pass
        return np.array([f(float(xi)) for xi in x.ravel()], dtype=float).reshape(x.shape)

    return g


def _cluster(u):
    p = _CLUSTER_P
    up, vp = u**p, (1.0 - u) ** p
    den = up + vp
    psi = up / den
    dpsi = p * (u * (1.0 - u)) ** (p - 1) / (den * den)
    return psi, dpsi


@dataclass(frozen=True)
class QuadResult:
    value: float
    converged: bool
    panels: int
    abs_mass: float
    nonfinite: bool = False


def gauss_panels(f, lo: float, hi: float, panels: int, transform: bool = False) -> QuadResult:
    """Single composite Gauss-Legendre sum; non-finite values flag ``nonfinite``.

    Nodes that round onto an endpoint under the clustering map carry
    negligible weight; non-finite values there are dropped.
    """
    width = hi - lo
    parts, mass = [], []
    bad = False
    for start in range(0, panels, _CHUNK):
        stop = min(panels, start + _CHUNK)
        left = np.arange(start, stop, dtype=float) / panels
        h = 1.0 / panels
        u = (left[:, None] + (0.5 * h) * (_NODES[None, :] + 1.0)).ravel()
        w = np.tile(0.5 * h * _WEIGHTS, stop - start)
        if transform:
            psi, dpsi = _cluster(u)
            t = lo + width * psi
            w = w * dpsi
        else:
            t = lo + width * u
        y = np.asarray(f(t), dtype=float)
        finite = np.isfinite(y)
        if not finite.all():
            collapsed = (t <= lo) | (t >= hi)
            if np.any(~finite & ~collapsed):
                bad = True
            y = np.where(finite, y, 0.0)
        contrib = w * y
        parts.append(math.fsum(contrib))
        mass.append(math.fsum(np.abs(contrib)))
    return QuadResult(width * math.fsum(parts), False, panels, width * math.fsum(mass), bad)


def integrate(
    f,
    lo: float,
    hi: float,
    rtol: float = 1e-10,
    max_panels: int = MAX_PANELS,
    transform: bool = False,
    min_panels: int = 4,
) -> QuadResult:
    """Halve panels until successive estimates agree to ``rtol`` relative.

    The relative scale is the L1 mass of the integrand, so integrals that are
    close to zero by cancellation still terminate.  A sequence whose
    increments stop shrinking (a divergent integral, typically) ends early
    with ``converged=False``; so does any non-finite value strictly inside
    the interval.
    """
    panels = min_panels
    prev = gauss_panels(f, lo, hi, panels, transform)
    if prev.nonfinite:
        return prev
    last_diff = None
    stalled = 0
    level = 0
    while panels < max_panels:
        panels *= 2
        level += 1
        cur = gauss_panels(f, lo, hi, panels, transform)
        if cur.nonfinite:
            return cur
        diff = abs(cur.value - prev.value)
        scale = max(abs(cur.value), cur.abs_mass)
        if diff <= rtol * scale:
            return QuadResult(cur.value, True, panels, cur.abs_mass)
        if last_diff is not None and diff > 0.9 * last_diff:
            stalled += 1
        else:
            stalled = 0
        if level >= 6 and stalled >= 3:
            return QuadResult(cur.value, False, panels, cur.abs_mass)
        last_diff = diff
        prev = cur
    return QuadResult(prev.value, False, panels, prev.abs_mass)
