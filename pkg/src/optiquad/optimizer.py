"""Re-derivation of the optimal knot.

The kernel family K2(0, beta, 1-beta, 1, t) is searched for the beta minimizing
g(beta) = int_0^1 |K2| dt.  Two independent routes are provided: the closed
piecewise-cubic formula from the three-case analysis, and a direct evaluation
of the defining integrals split at the roots of the absolute values.  A
brute-force grid scan refined by golden-section search checks the analytic
minimizer.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction

import numpy as np

from . import constants as C
from .errors import ConsistencyError

GRID_LO = -1.0
GRID_HI = 1.5
GRID_POINTS = 100_000
REFINE_WIDTH = 1e-12
INVPHI = (math.sqrt(5.0) - 1.0) / 2.0


def g_closed_form(beta):
    """Kernel L1 norm as a function of the knot, from the case analysis.

    Piecewise: ``1/24 - beta/8`` for beta <= 0, ``beta**3/3 - beta/8 + 1/24``
    on [0, 1/2], ``beta/8 - 1/24`` for beta >= 1/2.  Accepts scalars or arrays.
    """
    if isinstance(beta, Fraction):
        if beta <= 0:
            return Fraction(1, 24) - beta / 8
        if beta >= Fraction(1, 2):
            return beta / 8 - Fraction(1, 24)
        return beta**3 / 3 - beta / 8 + Fraction(1, 24)
    b = np.asarray(beta, dtype=float)
    out = np.where(
        b <= 0.0,
        1.0 / 24.0 - b / 8.0,
        np.where(b >= 0.5, b / 8.0 - 1.0 / 24.0, b**3 / 3.0 - b / 8.0 + 1.0 / 24.0),
    )
    return float(out) if out.ndim == 0 else out


def _clamp(x, lo, hi):
    if isinstance(x, np.ndarray):
        return np.minimum(np.maximum(x, lo), hi)
    return min(max(x, lo), hi)


def _g_split(beta, half, one):
    # 1/2 int_0^{1/2} t|t-beta| dt + 1/2 int_{1/2}^1 |t-1+beta|(1-t) dt,
    # each absolute value split at its root clamped into the integration range
    def left_anti(t):
        return t**3 / 3 - beta * t**2 / 2

    r = _clamp(beta, 0 * half, half)
    left = -(left_anti(r) - left_anti(0 * half)) + (left_anti(half) - left_anti(r))

    c = one - beta

    def right_anti(t):
        # antiderivative of (t - c)(1 - t)
        return -(t**3) / 3 + (one + c) * t**2 / 2 - c * t

    s = _clamp(c, half, one)
    right = -(right_anti(s) - right_anti(half)) + (right_anti(one) - right_anti(s))
    return (left + right) / 2


def g_numeric(beta):
    """Kernel L1 norm by direct piecewise integration of the absolute values.

    Works on floats, numpy arrays and :class:`fractions.Fraction` (exact).
    """
    if isinstance(beta, Fraction):
        return _g_split(beta, Fraction(1, 2), Fraction(1))
    b = np.asarray(beta, dtype=float)
    out = _g_split(b, 0.5, 1.0)
    return float(out) if np.ndim(out) == 0 else out


def golden_section(f, lo: float, hi: float, width: float = REFINE_WIDTH, max_iter: int = 500):
    """Minimize a unimodal ``f`` on [lo, hi] until the bracket is narrower than ``width``.

    Returns ``(x, f(x), iterations)``.  Ties move the bracket toward ``lo``.
    """
    x1 = hi - INVPHI * (hi - lo)
    x2 = lo + INVPHI * (hi - lo)
    f1, f2 = f(x1), f(x2)
    it = 0
    while hi - lo > width and it < max_iter:
        if f1 <= f2:
            hi, x2, f2 = x2, x1, f1
            x1 = hi - INVPHI * (hi - lo)
            f1 = f(x1)
        else:
            lo, x1, f1 = x1, x2, f2
            x2 = lo + INVPHI * (hi - lo)
            f2 = f(x2)
        it += 1
    x = 0.5 * (lo + hi)
    return x, f(x), it


@dataclass(frozen=True)
class CaseTrace:
    """Which branch of g holds the minimizer, with the outer-case lower bounds."""

    selected: str
    case_i_min: float
    case_ii_min: float
    case_iii_min: float
    stationary_points: tuple[float, float]
    second_derivative: float


@dataclass(frozen=True)
class MinimizerResult:
    beta_star: float
    g_star: float
    case_trace: CaseTrace
    oracle_beta: float
    oracle_gap: float
    grid_step: float = field(default=(GRID_HI - GRID_LO) / (GRID_POINTS - 1))


def _exact_g(x: float) -> Fraction:
    return g_numeric(Fraction(x))


def oracle_minimizer(lo: float = GRID_LO, hi: float = GRID_HI, points: int = GRID_POINTS):
    """Grid scan of ``g_numeric`` followed by golden-section refinement.

    The refinement evaluates g in exact rational arithmetic: near the minimum g
    is flat to second order, so binary64 evaluation cannot resolve the knot
    below roughly 1e-8.
    """
    grid = np.linspace(lo, hi, points)
    vals = g_numeric(grid)
    # np.argmin returns the first occurrence, so ties go to the smaller beta
    i = int(np.argmin(vals))
    left = grid[max(i - 1, 0)]
    right = grid[min(i + 1, points - 1)]
    x, _, _ = golden_section(_exact_g, float(left), float(right))
    return x


def minimize_g() -> MinimizerResult:
    """Locate the global minimizer of g and verify it against the brute-force oracle."""
    # case (ii): g'(beta) = beta^2 - 1/8 = 0, g''(beta) = 2 beta
    roots = (-math.sqrt(1.0 / 8.0), math.sqrt(1.0 / 8.0))
    beta = next(r for r in roots if 0.0 <= r <= 0.5 and 2.0 * r > 0.0)
    g_ii = g_closed_form(beta)
    # outer cases are linear with their minima at the case boundaries
    g_i = g_closed_form(0.0)
    g_iii = g_closed_form(0.5)
    if not (g_ii <= g_i and g_ii <= g_iii):
        raise ConsistencyError("stationary point of case (ii) is not the global minimum")
    trace = CaseTrace(
        selected="ii",
        case_i_min=g_i,
        case_ii_min=g_ii,
        case_iii_min=g_iii,
        stationary_points=roots,
        second_derivative=2.0 * beta,
    )
    if abs(g_ii - g_numeric(beta)) > 1e-10:
        raise ConsistencyError("closed-form and integrated g disagree at the minimizer")
    oracle = oracle_minimizer()
    return MinimizerResult(
        beta_star=beta,
        g_star=g_ii,
        case_trace=trace,
        oracle_beta=oracle,
        oracle_gap=abs(beta - oracle),
    )


def compare_simpson() -> tuple[float, float]:
    """L1 kernel norms of the optimal rule and of Simpson's rule (beta = 1/3)."""
    g_opt = g_closed_form(C.BETA_STAR)
    g_simp = float(g_closed_form(Fraction(1, 3)))
    if not g_opt < g_simp:
        raise ConsistencyError(f"optimal constant {g_opt} not below Simpson's {g_simp}")
    return g_opt, g_simp
